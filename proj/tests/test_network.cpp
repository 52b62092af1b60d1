#include <catch2/catch_amalgamated.hpp>

#include "lgpac/network.hpp"

using namespace lgpac;

namespace {

bool has_issue(const ValidationReport& rep, const std::string& code) {
    for (const auto& i : rep.issues)
        if (i.code == code && i.severity == ValidationIssue::Severity::Error) return true;
    return false;
}

// one constant input g, one stream input u1, integrator feedback, and a
// multiplier against the identity constant
Network feedback_example() {
    Network net;
    net.add_input("u1", ChannelKind::XStream);
    net.add_constant("xid", ChannelKind::XStream, ast_variable("x"));
    net.add_integrator("w", ChannelKind::XStream, "", "w", "u1");
    net.add_multiplier("prod", "w", "xid");
    net.mark_output("prod");
    return net;
}

}  // namespace

TEST_CASE("feedback network validates", "[network]") {
    Network net = feedback_example();
    auto rep = validate(net);
    INFO("issues: " << [&] {
        std::string s;
        for (auto& i : rep.issues) s += i.message + "; ";
        return s;
    }());
    CHECK(rep.ok());
    CHECK(rep.channel_kinds.at("prod") == ChannelKind::XStream);
    CHECK(rep.channel_kinds.at("w.c") == ChannelKind::XScalar);
    // u1 is a proper input, w/xid are consumed, prod is a proper output
    CHECK(std::find(rep.proper_inputs.begin(), rep.proper_inputs.end(), "u1") !=
          rep.proper_inputs.end());
    CHECK(std::find(rep.mixed.begin(), rep.mixed.end(), "w") != rep.mixed.end());
    CHECK(std::find(rep.proper_outputs.begin(), rep.proper_outputs.end(), "prod") !=
          rep.proper_outputs.end());
}

TEST_CASE("self-driving multiplier is an algebraic cycle", "[network]") {
    Network net;
    net.add_multiplier("m", "m", "m");
    auto rep = validate(net);
    CHECK_FALSE(rep.ok());
    CHECK(has_issue(rep, "algebraic-cycle"));
}

TEST_CASE("cycle through an integrator is fine", "[network]") {
    Network net;
    net.add_input("b", ChannelKind::RStream);
    net.add_input("k", ChannelKind::RScalar);
    net.add_constant("neg1", ChannelKind::RStream, -1.0);
    net.add_multiplier("asq", "inv", "inv");
    net.add_multiplier("nasq", "asq", "neg1");
    net.add_integrator("inv", ChannelKind::RStream, "k", "nasq", "b");
    auto rep = validate(net);
    CHECK(rep.ok());
}

TEST_CASE("mixed-kind adder is a kind mismatch", "[network]") {
    Network net;
    net.add_time("t");
    net.add_constant("gx", ChannelKind::XStream, ast_variable("x"));
    net.add_adder("bad", "t", "gx");
    auto rep = validate(net);
    CHECK_FALSE(rep.ok());
    CHECK(has_issue(rep, "kind-mismatch"));
}

TEST_CASE("dangling and multiply-driven inputs are reported", "[network]") {
    Network net;
    net.add_time("t");
    net.add_adder("s", "t", "nowhere");
    auto rep = validate(net);
    CHECK(has_issue(rep, "dangling-source"));

    Network net2;
    net2.add_time("t");
    net2.add_time("t2");
    net2.add_adder("s", "t", "t");
    net2.wire("t2", "s", "a");
    auto rep2 = validate(net2);
    CHECK(has_issue(rep2, "multiply-driven"));

    Network net3;
    net3.add_time("t");
    net3.wire("t", "ghost", "a");
    auto rep3 = validate(net3);
    CHECK(has_issue(rep3, "dangling-source"));
}

TEST_CASE("duplicate names are reported", "[network]") {
    Network net;
    net.add_time("t");
    net.add_constant("t", ChannelKind::RStream, 1.0);
    auto rep = validate(net);
    CHECK(has_issue(rep, "duplicate-name"));
}

TEST_CASE("limit module checks its modulus", "[network]") {
    Network net;
    net.add_time("t");
    net.add_limit("L", "t", "missing");
    auto rep = validate(net);
    CHECK(has_issue(rep, "unknown-modulus"));

    Network net2;
    net2.add_time("t");
    net2.add_modulus("m", Modulus::identity());
    net2.add_limit("L", "t", "m");
    auto rep2 = validate(net2);
    CHECK(rep2.ok());
}

TEST_CASE("integrator kind rules", "[network]") {
    // x-stream integrator may take a real-stream differential
    Network net;
    net.add_time("t");
    net.add_constant("one", ChannelKind::XStream, 1.0);
    net.add_constant("zero", ChannelKind::XScalar, 0.0);
    net.add_integrator("tx", ChannelKind::XStream, "zero", "one", "t");
    auto rep = validate(net);
    CHECK(rep.ok());

    // but the initial setting must be the matching scalar kind
    Network net2;
    net2.add_time("t");
    net2.add_constant("one", ChannelKind::XStream, 1.0);
    net2.add_constant("zero", ChannelKind::RScalar, 0.0);
    net2.add_integrator("tx", ChannelKind::XStream, "zero", "one", "t");
    auto rep2 = validate(net2);
    CHECK(has_issue(rep2, "kind-mismatch"));

    // and the integrand must match the output kind
    Network net3;
    net3.add_time("t");
    net3.add_constant("one", ChannelKind::RStream, 1.0);
    net3.add_constant("zero", ChannelKind::XScalar, 0.0);
    net3.add_integrator("tx", ChannelKind::XStream, "zero", "one", "t");
    auto rep3 = validate(net3);
    CHECK(has_issue(rep3, "kind-mismatch"));
}
