#include <cmath>

#include <gtest/gtest.h>

#include "webbend/metrics.hpp"
#include "webbend/synth.hpp"

using namespace webbend;

namespace {

ScenarioSpec quiet(std::size_t targets, std::size_t groups) {
  ScenarioSpec s;
  s.n_targets = targets;
  s.n_groups = groups;
  s.background_backlinkers = 0;
  s.background_link_rate = 0;
  s.target_link_rate = 0;
  return s;
}

}  // namespace

TEST(Synth, PureLinkFarmBackClosedForm) {
  for (auto [k, v] : {std::pair<std::size_t, LinkCount>{5, 100}, {3, 7}, {8, 1}}) {
    auto spec = quiet(k, 1);
    auto farm = PlantedManeuver::defaults(ManeuverKind::link_farm, GroupId("G0"));
    farm.volume = v;
    spec.planted = {farm};
    auto s = generate(spec);
    double expected = static_cast<double>((k - 1) * v) / static_cast<double>(1 + (k - 1) * v);
    for (const auto& t : s.grouping.targets()) EXPECT_NEAR(back(s.t2, s.grouping, t), expected, 1e-12);
  }
}

TEST(Synth, UniformToxicRatingsGiveNegatePointNine) {
  auto spec = quiet(6, 2);
  auto toxic = PlantedManeuver::defaults(ManeuverKind::toxic_backlinks, GroupId("G1"));
  toxic.rating_min = toxic.rating_max = 10;
  spec.planted = {toxic};
  auto s = generate(spec);
  for (const auto& t : s.grouping.members(GroupId("G1"))) EXPECT_NEAR(negate(s.t2, s.profiles, t).value, 0.9, 1e-12);
  for (const auto& t : s.grouping.members(GroupId("G0"))) EXPECT_TRUE(negate(s.t2, s.profiles, t).no_rated_backlinks);
}

TEST(Synth, ZeroDecayLeavesSnapshotsEqual) {
  ScenarioSpec spec;
  spec.planted = {PlantedManeuver::defaults(ManeuverKind::decay, GroupId("G0"))};
  spec.planted[0].fraction = 0;
  auto s = generate(spec);
  EXPECT_EQ(s.t1.edges(), s.t2.edges());
  for (const auto& t : s.grouping.targets()) {
    EXPECT_EQ(neglect(s.t1, s.t2, t).value, 0.0);
    EXPECT_EQ(neutralize(s.t1, s.t2, s.grouping, t), 0.0);
  }
}

TEST(Synth, DecayNeglectMatchesExactLossCounts) {
  ScenarioSpec spec;
  spec.seed = 17;
  const double f = 0.4;
  auto decay = PlantedManeuver::defaults(ManeuverKind::decay, GroupId("G2"));
  decay.fraction = f;
  spec.planted = {decay};
  auto s = generate(spec);
  for (const auto& t : s.grouping.members(GroupId("G2"))) {
    LinkCount lost = 0, kept = 0;
    for (const auto& [src, n] : s.t1.in_links(t)) {
      LinkCount drop = static_cast<LinkCount>(std::floor(f * static_cast<double>(n)));
      lost += drop;
      kept += n - drop;
    }
    double got = neglect(s.t1, s.t2, t).value;
    EXPECT_DOUBLE_EQ(got, static_cast<double>(lost) / static_cast<double>(std::max<LinkCount>(1, kept)));
    // rounding down can only remove less than f of each edge
    EXPECT_LE(got, f / (1 - f) + 1e-12);
  }
}

TEST(Synth, DeterministicAndWellFormed) {
  ScenarioSpec spec;
  spec.seed = 99;
  spec.planted = {PlantedManeuver::defaults(ManeuverKind::link_scheme, GroupId("G1")),
                  PlantedManeuver::defaults(ManeuverKind::co_amplification, GroupId("G0")),
                  PlantedManeuver::defaults(ManeuverKind::decay, GroupId("G2"))};
  auto a = generate(spec), b = generate(spec);
  EXPECT_EQ(a.t1, b.t1);
  EXPECT_EQ(a.t2, b.t2);
  EXPECT_EQ(a.grouping, b.grouping);
  for (const auto* g : {&a.t1, &a.t2})
    for (const auto& e : g->edges()) {
      EXPECT_NE(e.source, e.target);
      EXPECT_GE(e.links, 1u);
    }
  spec.seed = 100;
  EXPECT_FALSE(generate(spec).t1 == a.t1);
}

TEST(Synth, LinkSchemeAmplifiersHitAtLeastTwoMembers) {
  auto spec = quiet(9, 3);
  auto scheme = PlantedManeuver::defaults(ManeuverKind::link_scheme, GroupId("G0"));
  scheme.links_per_source = 2;
  spec.planted = {scheme};
  auto s = generate(spec);
  std::size_t amplifiers = 0;
  for (const auto& d : s.t1.domains()) {
    if (d.str().rfind("amp-", 0) != 0) continue;
    ++amplifiers;
    EXPECT_EQ(s.t1.out_links(d).size(), 2u);
    for (const auto& kv : s.t1.out_links(d)) EXPECT_EQ(s.grouping.group_of(kv.first), GroupId("G0"));
  }
  EXPECT_EQ(amplifiers, scheme.sources);
}

TEST(Synth, SpecValidation) {
  ScenarioSpec spec;
  spec.n_targets = 2;
  spec.n_groups = 3;
  EXPECT_THROW(generate(spec), SpecError);
  spec = {};
  spec.planted = {PlantedManeuver::defaults(ManeuverKind::link_farm, GroupId("G9"))};
  EXPECT_THROW(generate(spec), SpecError);
  spec = {};
  spec.planted = {PlantedManeuver::defaults(ManeuverKind::decay, GroupId("G0"))};
  spec.planted[0].fraction = 1.5;
  EXPECT_THROW(generate(spec), SpecError);
  spec = {};
  spec.background_link_rate = -0.1;
  EXPECT_THROW(generate(spec), SpecError);
  spec = quiet(3, 3);
  spec.planted = {PlantedManeuver::defaults(ManeuverKind::link_scheme, GroupId("G0"))};
  EXPECT_THROW(generate(spec), SpecError);
  EXPECT_THROW(parse_scenario_spec(nlohmann::json::parse(R"({"planted":[{"kind":"teleport","group":"G0"}]})")), SpecError);
}

TEST(Synth, SpecJsonRoundTrip) {
  ScenarioSpec spec;
  spec.seed = 5;
  spec.planted = {PlantedManeuver::defaults(ManeuverKind::toxic_backlinks, GroupId("G1")),
                  PlantedManeuver::defaults(ManeuverKind::decay, GroupId("G0"))};
  auto back_again = parse_scenario_spec(nlohmann::json::parse(to_json(spec).dump()));
  EXPECT_EQ(to_json(back_again), to_json(spec));
  EXPECT_EQ(generate(back_again).t1, generate(spec).t1);
}
