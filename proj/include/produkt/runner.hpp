#pragma once

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "produkt/certificate.hpp"
#include "produkt/config.hpp"
#include "produkt/constructive.hpp"
#include "produkt/decompose.hpp"
#include "produkt/growth.hpp"
#include "produkt/report.hpp"

namespace produkt {

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(sep, start);
    out.push_back(trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& text, const char* what) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  std::from_chars_result r;
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is missing from older standard libraries
    char* end = nullptr;
    value = static_cast<T>(std::strtod(first, &end));
    r.ptr = end;
    r.ec = end == first ? std::errc::invalid_argument : std::errc();
  } else {
    r = std::from_chars(first, last, value);
  }
  if (text.empty() || r.ec != std::errc() || r.ptr != last)
    fail(ErrorCode::ParseError, std::string(what) + ": '" + text + "' is not a number");
  return value;
}

inline std::vector<Elem> parse_element_list(const GroupContext& G, std::string_view text) {
  std::vector<Elem> out;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) fail(ErrorCode::ParseError, "empty element in '" + std::string(text) + "'");
    out.push_back(G.parse_element(item));
  }
  return out;
}

}  // namespace detail

/// Subset literals:
///   e1;e2;...            explicit elements (cycle notation, matrices, "1")
///   full                 the whole group
///   random:<size>:<seed> uniform random subset
///   class:<e>            conjugacy class of e
///   centralizer:<e>      centralizer of e
///   subgroup:<e1>;...    subgroup generated by the elements
inline Subset parse_subset(const GroupPtr& group, std::string_view literal) {
  const auto& G = *group;
  const std::string text = detail::trim(literal);
  if (text.empty()) fail(ErrorCode::ParseError, "empty subset literal");
  if (text == "full") return Subset::full(group);
  auto body = [&](std::string_view prefix) { return std::string_view(text).substr(prefix.size()); };
  if (text.starts_with("random:")) {
    const auto parts = detail::split(body("random:"), ':');
    if (parts.size() != 2) fail(ErrorCode::ParseError, "expected random:<size>:<seed>");
    return random_subset(group, detail::parse_number<std::uint32_t>(parts[0], "size"),
                         detail::parse_number<std::uint64_t>(parts[1], "seed"));
  }
  if (text.starts_with("class:")) return conjugacy_class(group, G.parse_element(body("class:"))).members;
  if (text.starts_with("centralizer:")) return centralizer(group, G.parse_element(body("centralizer:")));
  if (text.starts_with("subgroup:"))
    return generated_subgroup(Subset::of(group, detail::parse_element_list(G, body("subgroup:"))));
  return Subset::of(group, detail::parse_element_list(G, text));
}

struct RunOutcome {
  RunRecord record;
  Json certificate;  // null when the command writes none
  std::optional<Table> table;
  Json attachments = Json::object();
  bool partial = false;
};

struct ExperimentResult {
  Report report;
  /// 0 success, 2 partial
  int exit_code = 0;
};

namespace detail {

inline GroupPtr group_of(const ExperimentConfig& c) { return shared_context(GroupSpec::parse(c.require("group"))); }

inline std::uint64_t seed_of(const ExperimentConfig& c) {
  const auto s = c.get("seed");
  return s.empty() ? 0 : parse_number<std::uint64_t>(s, "seed");
}

inline RunRecord base_record(const ExperimentConfig& c, const GroupContext& G) {
  RunRecord r;
  r.command = c.command;
  r.group = G.spec().to_string();
  r.order = G.order();
  return r;
}

inline void fill_decomposition(RunRecord& r, const ConjugateDecomposition& dec) {
  r.set_size = dec.base.size();
  r.N = dec.N();
  r.ratio = dec.ratio();
  r.complete = dec.complete;
}

inline RunOutcome run_decompose(const ExperimentConfig& c) {
  auto group = group_of(c);
  const Subset A = parse_subset(group, c.require("set"));
  const auto pool = Pool::parse(c.get("pool"));
  const auto cap = parse_number<std::size_t>(c.get("cap"), "cap");
  const auto dec = greedy_decompose(A, pool, cap, derive_seed(seed_of(c), "decompose"));
  RunOutcome out{base_record(c, *group), decomposition_certificate(dec)};
  fill_decomposition(out.record, dec);
  out.record.measured["lower_bound"] = counting_lower_bound(A.size(), group->order());
  out.record.measured["pool"] = pool.to_string();
  out.partial = !dec.complete;
  return out;
}

inline RunOutcome run_oracle(const ExperimentConfig& c) {
  auto group = group_of(c);
  const Subset A = parse_subset(group, c.require("set"));
  const auto n_max = parse_number<unsigned>(c.get("n-max"), "n-max");
  const auto greedy = greedy_decompose(A, Pool::full(), 64, 0);
  const auto exact = minimal_decomposition(A, n_max);
  RunOutcome out{base_record(c, *group), nullptr};
  out.record.set_size = A.size();
  out.record.measured["greedy_N"] = greedy.N();
  out.record.measured["greedy_complete"] = greedy.complete;
  if (exact) {
    fill_decomposition(out.record, *exact);
    out.certificate = decomposition_certificate(*exact);
    out.certificate["method"] = "exhaustive";
    out.record.measured["greedy_over_oracle"] = double(greedy.N()) / double(exact->N());
  } else {
    out.record.measured["searched_up_to"] = n_max;
    out.partial = true;
  }
  return out;
}

inline RunOutcome run_cover(const ExperimentConfig& c) {
  auto group = group_of(c);
  const Subset H = parse_subset(group, c.require("subgroup"));
  const auto cap = parse_number<std::size_t>(c.get("cap"), "cap");
  const auto dec = subgroup_cover(H, Pool::parse(c.get("pool")), cap, derive_seed(seed_of(c), "cover"));
  RunOutcome out{base_record(c, *group), decomposition_certificate(dec)};
  fill_decomposition(out.record, dec);
  out.record.measured["f"] = dec.N();
  out.record.measured["subgroup_order"] = H.size();
  out.partial = !dec.complete;
  return out;
}

inline Table growth_table(const GrowthTrace& trace, std::size_t order) {
  Table t{{"step", "size", "epsilon"}, {}};
  for (std::size_t k = 0; k < trace.sizes.size(); ++k) {
    const auto size = trace.sizes[k].second;
    std::string eps;
    if (k > 0 && size < order && trace.sizes[k - 1].second > 1)
      eps = format_number(std::log(double(size)) / std::log(double(trace.sizes[k - 1].second)) - 1.0);
    t.rows.push_back({std::to_string(k), std::to_string(size), eps});
  }
  return t;
}

inline RunOutcome run_growth(const ExperimentConfig& c) {
  auto group = group_of(c);
  const auto seed = seed_of(c);
  const auto literal = c.get("set");
  const Subset X = literal.empty() ? symmetric_generating_pair(group, derive_seed(seed, "growth"))
                                   : parse_subset(group, literal);
  GrowthParams params;
  params.delta = default_delta(group->spec());
  params.max_steps = parse_number<unsigned>(c.get("max-steps"), "max-steps");
  RunOutcome out{base_record(c, *group), nullptr};
  GrowthTrace trace;
  try {
    trace = tripling_iteration(X, params);
  } catch (const StepLimitExceeded& e) {
    trace = e.partial();
    out.partial = true;
  }
  out.certificate = growth_certificate(X, trace);
  out.table = growth_table(trace, group->order());
  out.record.set_size = X.size();
  out.record.N = trace.sizes.size() - 1;
  out.record.complete = trace.reached_full;
  out.record.measured["steps"] = trace.sizes.size() - 1;
  if (!trace.epsilons.empty()) out.record.measured["epsilon"] = epsilon_estimate(trace);
  out.record.reference["delta"] = params.delta;
  out.record.reference["density_threshold"] = 1.0 - params.delta / 3.0;
  return out;
}

inline RunOutcome run_np_scan(const ExperimentConfig& c) {
  auto group = group_of(c);
  std::vector<double> densities;
  for (const auto& d : split(c.get("densities"), ',')) densities.push_back(parse_number<double>(d, "density"));
  const auto trials = parse_number<unsigned>(c.get("trials"), "trials");
  const auto seed = seed_of(c);
  const auto rows = np_threshold_scan(group, densities, trials, seed);
  RunOutcome out{base_record(c, *group), np_scan_certificate(*group, densities, trials, seed, rows)};
  Table t{{"density", "size", "success_fraction"}, {}};
  Json fractions = Json::array();
  for (const auto& r : rows) {
    t.rows.push_back({format_number(r.density, 4), std::to_string(r.size), format_number(r.success_fraction())});
    fractions.push_back(r.success_fraction());
  }
  out.table = std::move(t);
  out.record.complete = true;
  out.record.measured["success_fractions"] = fractions;
  out.record.measured["nondecreasing_after_majority"] = nondecreasing_after_majority(rows);
  const double delta = default_delta(group->spec());
  out.record.reference["delta"] = delta;
  out.record.reference["density_threshold"] = 1.0 - delta / 3.0;
  return out;
}

inline RunOutcome run_gen_conj(const ExperimentConfig& c) {
  auto group = group_of(c);
  const Elem x = group->parse_element(c.require("element"));
  const auto budget = parse_number<unsigned>(c.get("budget"), "budget");
  const auto cert = generating_conjugates(group, x, budget, derive_seed(seed_of(c), "gen-conj"));
  RunOutcome out{base_record(c, *group), generation_certificate(*group, cert)};
  out.record.set_size = 1;
  out.record.N = cert.count();
  out.record.complete = true;
  out.record.reference["bound"] = cert.bound;
  out.record.measured["count"] = cert.count();
  return out;
}

inline Subset with_identity(Subset A) {
  A.insert(kIdentity);
  return A;
}

inline RunOutcome pipeline_outcome(const ExperimentConfig& c, const PipelineResult& r) {
  const auto& G = r.original.base.group();
  RunOutcome out{base_record(c, G), pipeline_certificate(r)};
  fill_decomposition(out.record, r.decomposition);
  Json stages = Json::array();
  for (const auto& s : r.chain.stages)
    stages.push_back({{"label", s.label}, {"multiplier", s.multiplier}, {"count", s.count}});
  out.record.measured["input_size"] = r.original.base.size();
  out.record.measured["input_N"] = r.original.N();
  out.record.measured["input_complete"] = r.original.complete;
  out.record.measured["symmetrized"] = r.working.squared;
  out.record.measured["stages"] = std::move(stages);
  out.attachments["witness_chain"] = chain_json(G, r.chain);
  out.attachments["decomposition"] = decomposition_certificate(r.decomposition);
  out.partial = !r.decomposition.complete || !r.original.complete;
  return out;
}

inline RunOutcome run_constructive_an(const ExperimentConfig& c) {
  const auto n = parse_number<unsigned>(c.get("n"), "n");
  auto group = shared_context(GroupSpec::parse("A:" + std::to_string(n)));
  const auto result = alternating_pipeline(with_identity(parse_subset(group, c.require("set"))));
  auto out = pipeline_outcome(c, result);
  out.record.reference["bound"] = alternating_reference_bound(n);
  out.record.reference["form"] = "11520 n log n";
  out.record.measured["pipeline_length"] = alternating_pipeline_length(n);
  return out;
}

inline RunOutcome run_constructive_psl(const ExperimentConfig& c) {
  auto group = group_of(c);
  const auto budget = parse_number<unsigned>(c.get("budget"), "budget");
  const auto cap = parse_number<std::size_t>(c.get("cap"), "cap");
  const auto result =
      classical_pipeline(with_identity(parse_subset(group, c.require("set"))), seed_of(c), budget, cap);
  auto out = pipeline_outcome(c, result);
  const unsigned d = group->dimension();
  const unsigned q = group->field().order();
  const double shape = classical_reference_shape(d, q);
  out.record.reference["form"] = "c n^2 log q";
  out.record.reference["n^2 log q"] = shape;
  out.record.measured["coefficient"] = double(result.decomposition.N()) / shape;
  for (const auto& s : result.chain.stages) {
    if (s.label == "transvection") out.record.measured["k"] = s.partners.size();
    if (s.label == "root-sl2") {
      out.record.measured["k_H"] = s.multiplier;
      out.record.measured["c1"] = double(s.multiplier) / std::log(double(q));
    }
    if (s.label == "subgroup-cover") out.record.measured["f"] = s.multiplier;
  }
  return out;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Explicit --cert, else <cert-dir>/<command>-<hash of the config>.json with
/// the output-only options left out of the hash.
inline std::filesystem::path certificate_path(const ExperimentConfig& c) {
  if (auto p = c.find("cert"); p && !p->empty()) return *p;
  ExperimentConfig key{c.command, {}};
  for (const auto& [k, v] : c.options)
    if (k != "out" && k != "format" && k != "cert" && k != "cert-dir") key.options.emplace_back(k, v);
  return std::filesystem::path(c.get("cert-dir")) / (c.command + "-" + hex64(fnv1a(key.serialize())) + ".json");
}

inline RunOutcome dispatch(const ExperimentConfig& c) {
  const auto& cmd = c.command;
  if (cmd == "decompose") return run_decompose(c);
  if (cmd == "oracle") return run_oracle(c);
  if (cmd == "cover") return run_cover(c);
  if (cmd == "growth") return run_growth(c);
  if (cmd == "np-scan") return run_np_scan(c);
  if (cmd == "gen-conj") return run_gen_conj(c);
  if (cmd == "constructive-an") return run_constructive_an(c);
  if (cmd == "constructive-psl") return run_constructive_psl(c);
  fail(ErrorCode::DispatchError, "'" + cmd + "' is not a runnable experiment");
}

/// Runs one non-suite experiment and writes its certificate.
inline RunOutcome run_single(const ExperimentConfig& c) {
  c.validate();
  const auto start = std::chrono::steady_clock::now();
  auto out = dispatch(c);
  out.record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.certificate.is_null()) {
    const auto path = certificate_path(c);
    write_atomically(path, certificate_text(out.certificate));
    out.record.certificate = path.generic_string();
  }
  return out;
}

}  // namespace detail

/// Groups of the standard suite.
inline const std::vector<std::string>& standard_suite_groups() {
  static const std::vector<std::string> groups{"A:5",      "A:6",      "A:7",       "A:8",      "PSL:2:5", "PSL:2:7",
                                               "PSL:2:9",  "PSL:2:11", "PSL:2:13",  "PSL:3:2",  "PSL:3:3"};
  return groups;
}

/// `instances` random-subset decompositions per group, sizes spread
/// geometrically from 2 to |G|/4.
inline std::vector<ExperimentConfig> standard_suite(unsigned instances, std::uint64_t seed, const std::string& cert_dir) {
  std::vector<ExperimentConfig> out;
  const auto& groups = standard_suite_groups();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto order = expected_order(GroupSpec::parse(groups[gi]));
    const double hi = std::log(double(order) / 4.0), lo = std::log(2.0);
    for (unsigned i = 0; i < instances; ++i) {
      const double t = instances > 1 ? double(i) / double(instances - 1) : 0.0;
      const auto size = std::max<std::uint64_t>(2, std::llround(std::exp(lo + (hi - lo) * t)));
      const auto s = derive_seed(seed, "suite", (std::uint64_t(gi) << 32) | i);
      ExperimentConfig c{"decompose", {}};
      c.set("group", groups[gi]);
      c.set("set", "random:" + std::to_string(size) + ":" + std::to_string(s));
      c.set("pool", Pool::default_for(order).to_string());
      c.set("cap", "256");
      c.set("seed", std::to_string(s));
      c.set("cert-dir", cert_dir);
      out.push_back(std::move(c));
    }
  }
  return out;
}

/// max ratio per family (complete runs), smallest epsilon, c1 and cover
/// counts, merged in config order.
inline Json aggregate(const std::vector<RunRecord>& runs) {
  Json agg = Json::object();
  Json max_ratio = Json::object();
  Json covers = Json::array();
  for (const auto& r : runs) {
    if (r.complete && r.N > 0 && r.command != "growth" && r.command != "np-scan" && r.command != "gen-conj") {
      const auto family = GroupSpec::parse(r.group).family_name();
      if (!max_ratio.contains(family) || max_ratio[family].get<double>() < r.ratio) max_ratio[family] = r.ratio;
    }
    if (r.measured.contains("epsilon")) {
      const double e = r.measured["epsilon"].get<double>();
      if (!agg.contains("min_epsilon") || agg["min_epsilon"].get<double>() > e) agg["min_epsilon"] = e;
    }
    if (r.measured.contains("c1")) {
      const double c1 = r.measured["c1"].get<double>();
      if (!agg.contains("max_c1") || agg["max_c1"].get<double>() < c1) agg["max_c1"] = c1;
    }
    if (r.command == "cover")
      covers.push_back({{"group", r.group}, {"subgroup_order", r.set_size}, {"f", r.N}, {"complete", r.complete}});
  }
  agg["max_ratio"] = std::move(max_ratio);
  if (!covers.empty()) agg["covers"] = std::move(covers);
  return agg;
}

/// Runs a config (a single experiment or a suite) and writes the report
/// to --out when given.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  Report& report = result.report;
  report.config.push_back(config.serialize());

  std::vector<ExperimentConfig> entries;
  if (config.command == "suite") {
    const auto path = config.get("config");
    if (path.empty()) {
      entries = standard_suite(detail::parse_number<unsigned>(config.get("instances"), "instances"),
                               detail::seed_of(config), config.get("cert-dir"));
    } else {
      entries = parse_config_lines(read_file(path));
      for (auto& e : entries)
        if (e.command == "suite" || e.command == "verify")
          fail(ErrorCode::DispatchError, "suite entries cannot be '" + e.command + "'");
    }
    for (const auto& e : entries) report.config.push_back(e.serialize());
  } else {
    entries.push_back(config);
  }

  for (const auto& e : entries) {
    auto out = detail::run_single(e);
    if (out.partial) result.exit_code = 2;
    if (entries.size() == 1) {
      report.table = std::move(out.table);
      report.attachments = std::move(out.attachments);
    }
    report.runs.push_back(std::move(out.record));
  }
  report.aggregates = aggregate(report.runs);

  if (const auto out = config.get("out"); !out.empty()) write_atomically(out, emit_report(report, config.get("format")));
  return result;
}

}  // namespace produkt
