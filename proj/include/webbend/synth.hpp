#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "webbend/errors.hpp"
#include "webbend/graph.hpp"
#include "webbend/ingest.hpp"

namespace webbend {

enum class ManeuverKind { link_farm, link_scheme, toxic_backlinks, co_amplification, decay };

inline const char* to_string(ManeuverKind k) {
  switch (k) {
    case ManeuverKind::link_farm: return "link_farm";
    case ManeuverKind::link_scheme: return "link_scheme";
    case ManeuverKind::toxic_backlinks: return "toxic_backlinks";
    case ManeuverKind::co_amplification: return "co_amplification";
    case ManeuverKind::decay: return "decay";
  }
  return "unknown";
}

// One planted structure. Only the fields relevant to `kind` are read:
//   link_farm         volume
//   link_scheme       sources (amplifiers), volume, links_per_source (0 = every member), rating_min/max
//   toxic_backlinks   sources, volume, rating_min/max
//   co_amplification  fraction of background backlinkers that link every member
//   decay             fraction of each inbound edge removed between t1 and t2 (rounded down)
struct PlantedManeuver {
  ManeuverKind kind = ManeuverKind::link_farm;
  GroupId group;
  LinkCount volume = 10;
  std::size_t sources = 20;
  std::size_t links_per_source = 0;
  int rating_min = 0;
  int rating_max = 10;
  double fraction = 0.5;

  static PlantedManeuver defaults(ManeuverKind kind, GroupId group) {
    PlantedManeuver p;
    p.kind = kind;
    p.group = std::move(group);
    switch (kind) {
      case ManeuverKind::link_farm:
        p.volume = 10;
        break;
      case ManeuverKind::link_scheme:
        p.sources = 20;
        p.volume = 10;
        p.rating_min = 10;
        p.rating_max = 40;
        break;
      case ManeuverKind::toxic_backlinks:
        p.sources = 30;
        p.volume = 5;
        p.rating_min = 0;
        p.rating_max = 10;
        break;
      case ManeuverKind::co_amplification:
        p.fraction = 0.5;
        break;
      case ManeuverKind::decay:
        p.fraction = 0.5;
        break;
    }
    return p;
  }
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::size_t n_targets = 30;
  std::size_t n_groups = 3;
  std::size_t background_backlinkers = 200;
  double background_link_rate = 0.1;
  double target_link_rate = 0.05;  // chance each ordered target pair carries a background link
  std::vector<PlantedManeuver> planted;

  void validate() const {
    if (n_targets < 1) throw SpecError("n_targets must be >= 1");
    if (n_groups < 1) throw SpecError("n_groups must be >= 1");
    if (n_groups > n_targets) throw SpecError("n_groups must not exceed n_targets");
    auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!unit(background_link_rate)) throw SpecError("background_link_rate must lie in [0,1]");
    if (!unit(target_link_rate)) throw SpecError("target_link_rate must lie in [0,1]");
    for (const auto& p : planted) {
      const std::string where = std::string(to_string(p.kind)) + " on " + p.group.str();
      auto idx = group_index(p.group);
      if (!idx) throw SpecError(where + ": unknown group");
      if (p.volume < 1) throw SpecError(where + ": volume must be >= 1");
      if (p.rating_min < 0 || p.rating_max > 100 || p.rating_min > p.rating_max)
        throw SpecError(where + ": rating range must satisfy 0 <= min <= max <= 100");
      if (!unit(p.fraction)) throw SpecError(where + ": fraction must lie in [0,1]");
      if (p.kind == ManeuverKind::link_scheme) {
        std::size_t size = group_size(*idx);
        if (size < 2) throw SpecError(where + ": link scheme needs a group of at least 2 targets");
        if (p.links_per_source == 1 || p.links_per_source > size)
          throw SpecError(where + ": links_per_source must be 0 or in [2, group size]");
      }
    }
  }

  std::optional<std::size_t> group_index(const GroupId& g) const {
    const std::string& s = g.str();
    if (s.size() < 2 || s[0] != 'G') return std::nullopt;
    auto n = detail::parse_int<std::size_t>(s.substr(1));
    if (!n || *n >= n_groups || s != "G" + std::to_string(*n)) return std::nullopt;
    return n;
  }

  std::size_t group_size(std::size_t g) const { return n_targets / n_groups + (g < n_targets % n_groups ? 1 : 0); }
};

struct Scenario {
  WebGraphSnapshot t1;
  WebGraphSnapshot t2;
  TargetGrouping grouping;
  ProfileTable profiles;
};

namespace detail {

inline std::string padded(std::size_t i, std::size_t count) {
  std::string digits = std::to_string(i);
  std::size_t width = std::max<std::size_t>(2, std::to_string(count > 0 ? count - 1 : 0).size());
  return std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

inline std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

// Deterministic for a fixed spec. Targets are t<i>.example assigned round-robin to groups G0..G<k-1>.
inline Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<LinkCount> noise_volume(1, 5);
  std::uniform_int_distribution<int> background_rating(30, 70);

  std::vector<DomainId> targets;
  std::map<DomainId, GroupId> assignment;
  std::vector<std::vector<DomainId>> members(spec.n_groups);
  for (std::size_t i = 0; i < spec.n_targets; ++i) {
    DomainId d("t" + detail::padded(i, spec.n_targets) + ".example");
    std::size_t g = i % spec.n_groups;
    targets.push_back(d);
    members[g].push_back(d);
    assignment.emplace(d, GroupId("G" + std::to_string(g)));
  }

  Scenario s;
  s.grouping = TargetGrouping::from_assignment(assignment);
  SnapshotBuilder t1("t1");
  auto rate = [&](const DomainId& d, int lo, int hi) {
    std::uniform_int_distribution<int> r(lo, hi);
    s.profiles[d] = DomainProfile(d, r(rng));
  };

  for (const auto& t : targets) rate(t, 30, 70);

  std::vector<DomainId> background;
  std::bernoulli_distribution background_hit(spec.background_link_rate);
  for (std::size_t b = 0; b < spec.background_backlinkers; ++b) {
    DomainId d("bg-" + detail::padded(b, spec.background_backlinkers) + ".net");
    background.push_back(d);
    s.profiles[d] = DomainProfile(d, background_rating(rng));
    for (const auto& t : targets)
      if (background_hit(rng)) t1.add(d, t, noise_volume(rng));
  }

  std::bernoulli_distribution target_hit(spec.target_link_rate);
  for (const auto& src : targets)
    for (const auto& dst : targets)
      if (src != dst && target_hit(rng)) t1.add(src, dst, noise_volume(rng));

  std::map<DomainId, double> decay;
  std::size_t planted_index = 0;
  for (const auto& p : spec.planted) {
    const auto& group = members[*spec.group_index(p.group)];
    const std::string tag = detail::lowercase(p.group.str()) + "-" + std::to_string(planted_index++);
    switch (p.kind) {
      case ManeuverKind::link_farm:
        for (const auto& a : group)
          for (const auto& b : group)
            if (a != b) t1.add(a, b, p.volume);
        break;
      case ManeuverKind::link_scheme: {
        std::size_t fan = p.links_per_source == 0 ? group.size() : p.links_per_source;
        for (std::size_t i = 0; i < p.sources; ++i) {
          DomainId amp("amp-" + tag + "-" + detail::padded(i, p.sources) + ".net");
          rate(amp, p.rating_min, p.rating_max);
          std::vector<DomainId> picks = group;
          std::shuffle(picks.begin(), picks.end(), rng);
          for (std::size_t k = 0; k < fan; ++k) t1.add(amp, picks[k], p.volume);
        }
        break;
      }
      case ManeuverKind::toxic_backlinks:
        for (std::size_t i = 0; i < p.sources; ++i) {
          DomainId tox("toxic-" + tag + "-" + detail::padded(i, p.sources) + ".net");
          rate(tox, p.rating_min, p.rating_max);
          for (const auto& t : group) t1.add(tox, t, p.volume);
        }
        break;
      case ManeuverKind::co_amplification: {
        std::bernoulli_distribution joins(p.fraction);
        for (const auto& b : background)
          if (joins(rng))
            for (const auto& t : group) t1.add(b, t, noise_volume(rng));
        break;
      }
      case ManeuverKind::decay:
        for (const auto& t : group) {
          // successive decays compound: keep (1-f1)(1-f2)... of the volume
          auto [it, fresh] = decay.emplace(t, p.fraction);
          if (!fresh) it->second = 1.0 - (1.0 - it->second) * (1.0 - p.fraction);
        }
        break;
    }
  }

  s.t1 = std::move(t1).build();
  SnapshotBuilder t2("t2");
  for (const auto& e : s.t1.edges()) {
    LinkCount keep = e.links;
    if (auto it = decay.find(e.target); it != decay.end())
      keep -= static_cast<LinkCount>(std::floor(it->second * static_cast<double>(e.links)));
    t2.add(e.source, e.target, keep);
  }
  s.t2 = std::move(t2).build();
  return s;
}

inline ScenarioSpec parse_scenario_spec(const nlohmann::json& j) {
  ScenarioSpec spec;
  try {
    if (!j.is_object()) throw SpecError("scenario spec must be a JSON object");
    spec.seed = j.value("seed", spec.seed);
    spec.n_targets = j.value("n_targets", spec.n_targets);
    spec.n_groups = j.value("n_groups", spec.n_groups);
    spec.background_backlinkers = j.value("background_backlinkers", spec.background_backlinkers);
    spec.background_link_rate = j.value("background_link_rate", spec.background_link_rate);
    spec.target_link_rate = j.value("target_link_rate", spec.target_link_rate);
    if (j.contains("planted")) {
      for (const auto& item : j.at("planted")) {
        const std::string kind = item.at("kind").get<std::string>();
        std::optional<ManeuverKind> k;
        for (auto candidate : {ManeuverKind::link_farm, ManeuverKind::link_scheme, ManeuverKind::toxic_backlinks,
                               ManeuverKind::co_amplification, ManeuverKind::decay})
          if (kind == to_string(candidate)) k = candidate;
        if (!k) throw SpecError("unknown planted maneuver kind '" + kind + "'");
        auto p = PlantedManeuver::defaults(*k, GroupId(item.at("group").get<std::string>()));
        p.volume = item.value("volume", p.volume);
        p.sources = item.value("sources", p.sources);
        p.links_per_source = item.value("links_per_source", p.links_per_source);
        p.rating_min = item.value("rating_min", p.rating_min);
        p.rating_max = item.value("rating_max", p.rating_max);
        p.fraction = item.value("fraction", p.fraction);
        spec.planted.push_back(std::move(p));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("invalid scenario spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

inline ScenarioSpec load_scenario_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(path + ": invalid JSON: " + e.what());
  }
  return parse_scenario_spec(j);
}

inline nlohmann::ordered_json to_json(const ScenarioSpec& spec) {
  nlohmann::ordered_json j;
  j["seed"] = spec.seed;
  j["n_targets"] = spec.n_targets;
  j["n_groups"] = spec.n_groups;
  j["background_backlinkers"] = spec.background_backlinkers;
  j["background_link_rate"] = spec.background_link_rate;
  j["target_link_rate"] = spec.target_link_rate;
  j["planted"] = nlohmann::ordered_json::array();
  for (const auto& p : spec.planted) {
    nlohmann::ordered_json q;
    q["kind"] = to_string(p.kind);
    q["group"] = p.group.str();
    switch (p.kind) {
      case ManeuverKind::link_farm:
        q["volume"] = p.volume;
        break;
      case ManeuverKind::link_scheme:
        q["sources"] = p.sources;
        q["volume"] = p.volume;
        q["links_per_source"] = p.links_per_source;
        q["rating_min"] = p.rating_min;
        q["rating_max"] = p.rating_max;
        break;
      case ManeuverKind::toxic_backlinks:
        q["sources"] = p.sources;
        q["volume"] = p.volume;
        q["rating_min"] = p.rating_min;
        q["rating_max"] = p.rating_max;
        break;
      case ManeuverKind::co_amplification:
      case ManeuverKind::decay:
        q["fraction"] = p.fraction;
        break;
    }
    j["planted"].push_back(std::move(q));
  }
  return j;
}

inline std::string planted_summary(const ScenarioSpec& spec) {
  std::ostringstream os;
  os << "scenario seed=" << spec.seed << " targets=" << spec.n_targets << " groups=" << spec.n_groups
     << " background_backlinkers=" << spec.background_backlinkers << " background_link_rate=" << spec.background_link_rate
     << " target_link_rate=" << spec.target_link_rate << '\n';
  if (spec.planted.empty()) os << "  (no planted maneuvers)\n";
  for (const auto& p : spec.planted) {
    os << "  " << to_string(p.kind) << " on " << p.group << ": ";
    switch (p.kind) {
      case ManeuverKind::link_farm: os << "clique volume " << p.volume; break;
      case ManeuverKind::link_scheme:
        os << p.sources << " amplifiers x volume " << p.volume << ", ratings " << p.rating_min << "-" << p.rating_max;
        break;
      case ManeuverKind::toxic_backlinks:
        os << p.sources << " sources x volume " << p.volume << ", ratings " << p.rating_min << "-" << p.rating_max;
        break;
      case ManeuverKind::co_amplification: os << "fraction " << p.fraction << " of background"; break;
      case ManeuverKind::decay: os << "fraction " << p.fraction << " removed by t2"; break;
    }
    os << '\n';
  }
  return os.str();
}

struct DatasetFiles {
  std::filesystem::path t1, t2, profiles, groups, manifest;
};

// Writes t1.csv, t2.csv, profiles.csv, groups.csv and manifest.json into `dir`.
inline DatasetFiles write_dataset(const Scenario& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  DatasetFiles f{dir / "t1.csv", dir / "t2.csv", dir / "profiles.csv", dir / "groups.csv", dir / "manifest.json"};
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw FileError(p.string(), "cannot write file");
    return out;
  };
  {
    auto out = open(f.t1);
    write_edges(out, s.t1);
  }
  {
    auto out = open(f.t2);
    write_edges(out, s.t2);
  }
  {
    auto out = open(f.profiles);
    write_profiles(out, s.profiles);
  }
  {
    auto out = open(f.groups);
    write_grouping(out, s.grouping);
  }
  nlohmann::ordered_json m;
  m["snapshots"] = nlohmann::ordered_json::array({{{"label", "t1"}, {"edges", "t1.csv"}}, {{"label", "t2"}, {"edges", "t2.csv"}}});
  m["profiles"] = "profiles.csv";
  m["groups"] = "groups.csv";
  auto out = open(f.manifest);
  out << m.dump(2) << '\n';
  return f;
}

}  // namespace webbend
