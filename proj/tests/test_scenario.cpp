// Scenario files: parsing, located errors, generation round trips and the two commands.
#include <doctest.h>

#include <cstdlib>

#include <json.hpp>

#include "qsplit/scenario.hpp"

using namespace qsplit;
using json = nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return std::string(QSPLIT_FIXTURE_DIR) + "/" + name + ".json"; }

std::string error_of(const std::string& text) {
    try {
        scenario_from_text(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

ErrorCode code_of(const std::string& text) {
    try {
        scenario_from_text(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::ParseError;
}

json small_trivial() {
    return json::parse(scenario_to_text(scenario_generate(fixture_spec_for("trivial", 1, 2)), false));
}

}  // namespace

TEST_CASE("checked-in fixtures parse") {
    const Scenario t = scenario_parse(fixture("trivial"));
    CHECK(t.depth == 3);
    CHECK(t.base->cats[0]->size() == 1);
    CHECK(t.source == "generated");

    const Scenario a = scenario_parse(fixture("amp2"));
    CHECK(a.spec.kind == "amp");
    CHECK(a.spec.n == 2);
    CHECK(a.gammas[0] == IntMatrix{{2}});

    const Scenario p = scenario_parse(fixture("amp2_perturbed"));
    CHECK(p.source == "explicit");
}

TEST_CASE("fixture kinds") {
    CHECK(fixture_spec_for("amp(2)", 1).n == 2);
    CHECK(fixture_spec_for("amp3", 1).depth == 3);
    CHECK(fixture_spec_for("forced_l(2)", 1).l0 == 2);
    CHECK(fixture_spec_for("fib", 1).depth == 4);
    CHECK_THROWS_AS(fixture_spec_for("amp4", 1), Error);
    CHECK_THROWS_AS(fixture_spec_for("forced_l3", 1), Error);
    CHECK_THROWS_AS(fixture_spec_for("klein", 1), Error);
}

TEST_CASE("malformed JSON reports the line") {
    const std::string msg = error_of("{\n  \"name\": \"x\",\n  \"depth\": 2,,\n}");
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(code_of("{\n \"name\": 3 }") == ErrorCode::ParseError);
}

TEST_CASE("missing and mistyped fields are named") {
    json j = small_trivial();
    j.erase("gammas");
    CHECK(error_of(j.dump()).find("'gammas'") != std::string::npos);

    j = small_trivial();
    j["categories"][1]["labels"][0] = 7;
    CHECK(error_of(j.dump()).find("categories[1].labels[0]") != std::string::npos);

    j = small_trivial();
    j["q_source"]["seed"] = -4;
    CHECK(error_of(j.dump()).find("q_source.seed") != std::string::npos);
}

TEST_CASE("a zero column in a multiplicity matrix is a validation error") {
    json j = json::parse(scenario_to_text(scenario_generate(fixture_spec_for("fib", 1, 3)), false));
    j["gammas"][1] = IntMatrix{{1, 0}, {1, 0}};
    CHECK(code_of(j.dump()) == ErrorCode::ValidationError);
    CHECK(error_of(j.dump()).find("zero column in Γ_2") != std::string::npos);
}

TEST_CASE("generated sources must agree with the stored tower") {
    json j = json::parse(scenario_to_text(scenario_generate(fixture_spec_for("amp2", 1, 3)), false));
    j["gammas"][2] = IntMatrix{{3}};
    CHECK(error_of(j.dump()).find("Γ_3") != std::string::npos);
}

TEST_CASE("explicit blocks are dimension-checked") {
    json j = json::parse(scenario_to_text(scenario_generate(fixture_spec_for("amp2", 1, 2)), true));
    auto& block = j["q_source"]["m"][1][0][0];
    block.erase(block.begin());
    CHECK(code_of(j.dump()) == ErrorCode::ValidationError);

    j = json::parse(scenario_to_text(scenario_generate(fixture_spec_for("amp2", 1, 2)), true));
    j["q_source"]["i"][0][0][0][0] = json::array({1.0});
    CHECK(error_of(j.dump()).find("q_source.i[0][0][0][0]") != std::string::npos);
}

TEST_CASE("generation is deterministic and round-trips through check") {
    for (const std::string kind : {"trivial", "amp2", "amp3", "fib", "forced_l2"}) {
        for (std::uint64_t seed : {1u, 7u}) {
            CAPTURE(kind);
            CAPTURE(seed);
            const FixtureSpec spec = fixture_spec_for(kind, seed, 3);
            const std::string text = scenario_to_text(scenario_generate(spec), false);
            CHECK(text == scenario_to_text(scenario_generate(spec), false));
            const Scenario back = scenario_from_text(text);
            CHECK(scenario_to_text(back, false) == text);
            CHECK(cmd_check(back, TolerancePolicy{}).exit_code == 0);

            // The explicit form carries the same numbers.
            const Scenario ex = scenario_from_text(scenario_to_text(back, true));
            CHECK(cmd_check(ex, TolerancePolicy{}).exit_code == 0);
        }
    }
}

TEST_CASE("check reports d_Q and names failing levels") {
    const Scenario a = scenario_parse(fixture("amp2"));
    const CommandResult r = cmd_check(a, TolerancePolicy{});
    CHECK(r.exit_code == 0);
    const json rep = json::parse(r.report);
    CHECK(rep["stability_level"] == 0);
    for (const auto& lv : rep["levels"]) CHECK(lv["d_Q"][0].get<double>() == doctest::Approx(4.0).epsilon(1e-12));

    const CommandResult p = cmd_check(scenario_parse(fixture("amp2_perturbed")), TolerancePolicy{});
    CHECK(p.exit_code == 1);
    const json prep = json::parse(p.report);
    CHECK(prep["stability_level"].is_null());
    CHECK(prep["failing_levels"].back() == 3);

    const json f = json::parse(cmd_check(scenario_parse(fixture("forced_l2")), TolerancePolicy{}).report);
    CHECK(f["stability_level"] == 2);
    CHECK(f["failing_levels"] == json::array({0, 1}));
    CHECK(f["pass"] == true);
}

TEST_CASE("reports are byte-stable, serial or parallel") {
    const Scenario s = scenario_parse(fixture("fib"));
    const std::string a = cmd_check(s, TolerancePolicy{}).report;
    CHECK(a == cmd_check(s, TolerancePolicy{}).report);
    CHECK(a == cmd_check(s, TolerancePolicy{}, 4).report);
    const std::string c = cmd_split(s, TolerancePolicy{}).report;
    CHECK(c == cmd_split(s, TolerancePolicy{}, -1, 3).report);
}

TEST_CASE("split certificate layout") {
    const CommandResult r = cmd_split(scenario_parse(fixture("forced_l2")), TolerancePolicy{});
    CHECK(r.exit_code == 0);
    const json c = json::parse(r.report);
    CHECK(c["fixture"] == "forced_l2");
    CHECK(c["l"] == 2);
    CHECK(c["depth"] == 4);
    CHECK(c["levels"].size() == 2);
    CHECK(c["pass"] == true);
    CHECK(c["tolerances"]["eps_num"] == 1e-9);
    for (const auto& lv : c["levels"]) CHECK(lv["pass"] == true);

    const CommandResult bad = cmd_split(scenario_parse(fixture("amp2_perturbed")), TolerancePolicy{});
    CHECK(bad.exit_code == 1);
    CHECK_THROWS_AS(cmd_split(scenario_parse(fixture("amp2")), TolerancePolicy{}, 9), Error);
}

TEST_CASE("tolerance precedence: default, file, environment, flag") {
    json j = small_trivial();
    Scenario s = scenario_from_text(j.dump());
    ::unsetenv("QSPLIT_TOL");
    CHECK(resolve_tolerance(s, std::nullopt).eps_num == 1e-9);

    j["tolerances"] = json{{"eps_num", 1e-7}, {"tau_rel", 1e-6}};
    s = scenario_from_text(j.dump());
    CHECK(resolve_tolerance(s, std::nullopt).eps_num == 1e-7);
    CHECK(resolve_tolerance(s, std::nullopt).tau_rel == 1e-6);

    ::setenv("QSPLIT_TOL", "1e-5", 1);
    CHECK(resolve_tolerance(s, std::nullopt).eps_num == 1e-5);
    CHECK(resolve_tolerance(s, 1e-3).eps_num == 1e-3);
    ::setenv("QSPLIT_TOL", "tight", 1);
    CHECK_THROWS_AS(resolve_tolerance(s, std::nullopt), Error);
    ::unsetenv("QSPLIT_TOL");
    CHECK_THROWS_AS(resolve_tolerance(s, -1.0), Error);
}
