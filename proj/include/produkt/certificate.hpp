#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "produkt/constructive.hpp"
#include "produkt/decompose.hpp"
#include "produkt/error.hpp"
#include "produkt/group.hpp"
#include "produkt/growth.hpp"
#include "produkt/subset.hpp"

namespace produkt {

using Json = nlohmann::ordered_json;

inline constexpr int kCertificateSchema = 1;

inline Json format_elements(const GroupContext& G, std::span<const Elem> elems) {
  Json out = Json::array();
  for (Elem e : elems) out.push_back(G.format(e));
  return out;
}

inline std::vector<Elem> parse_elements(const GroupContext& G, const Json& list) {
  std::vector<Elem> out;
  for (const auto& item : list) out.push_back(G.parse_element(item.get<std::string>()));
  return out;
}

inline Json decomposition_certificate(const ConjugateDecomposition& dec) {
  const auto& G = dec.base.group();
  Json j;
  j["kind"] = "decomposition";
  j["schema"] = kCertificateSchema;
  j["group"] = G.spec().to_string();
  j["order"] = G.order();
  j["base"] = format_elements(G, dec.base.members());
  j["target"] = dec.target ? format_elements(G, dec.target->members()) : Json(nullptr);
  j["N"] = dec.N();
  j["conjugators"] = format_elements(G, dec.conjugators);
  j["complete"] = dec.complete;
  j["trace"] = dec.trace;
  return j;
}

inline ConjugateDecomposition decomposition_from_certificate(const Json& j) {
  auto group = shared_context(GroupSpec::parse(j.at("group").get<std::string>()));
  ConjugateDecomposition dec{Subset::of(group, parse_elements(*group, j.at("base"))),
                             parse_elements(*group, j.at("conjugators")),
                             j.at("complete").get<bool>(),
                             j.at("trace").get<std::vector<std::size_t>>(),
                             std::nullopt};
  if (!j.at("target").is_null()) dec.target = Subset::of(group, parse_elements(*group, j.at("target")));
  return dec;
}

inline Json factors_json(const GroupContext& G, std::span<const Factor> factors) {
  Json out = Json::array();
  for (const auto& f : factors) out.push_back(Json::array({f.sign, G.format(f.conjugator)}));
  return out;
}

inline Json chain_json(const GroupContext& G, const WitnessChain& chain) {
  Json j;
  j["x"] = G.format(chain.x);
  j["total"] = chain.total();
  Json stages = Json::array();
  for (const auto& s : chain.stages) {
    Json st;
    st["label"] = s.label;
    st["element"] = s.element ? Json(G.format(*s.element)) : Json(nullptr);
    st["partners"] = format_elements(G, s.partners);
    st["expression"] = factors_json(G, s.expression);
    st["conjugators"] = format_elements(G, s.conjugators);
    st["multiplier"] = s.multiplier;
    st["count"] = s.count;
    stages.push_back(std::move(st));
  }
  j["stages"] = std::move(stages);
  return j;
}

inline WitnessChain chain_from_json(const GroupContext& G, const Json& j) {
  WitnessChain chain;
  chain.x = G.parse_element(j.at("x").get<std::string>());
  for (const auto& st : j.at("stages")) {
    WitnessStage s;
    s.label = st.at("label").get<std::string>();
    if (!st.at("element").is_null()) s.element = G.parse_element(st.at("element").get<std::string>());
    s.partners = parse_elements(G, st.at("partners"));
    for (const auto& f : st.at("expression"))
      s.expression.push_back({f.at(0).get<int>(), G.parse_element(f.at(1).get<std::string>())});
    s.conjugators = parse_elements(G, st.at("conjugators"));
    s.multiplier = st.at("multiplier").get<std::size_t>();
    s.count = st.at("count").get<std::size_t>();
    chain.stages.push_back(std::move(s));
  }
  return chain;
}

inline Json pipeline_certificate(const PipelineResult& r) {
  const auto& G = r.original.base.group();
  Json j;
  j["kind"] = "witness-chain";
  j["schema"] = kCertificateSchema;
  j["group"] = G.spec().to_string();
  j["chain"] = chain_json(G, r.chain);
  j["working_set"] = decomposition_certificate(r.decomposition);
  j["original"] = decomposition_certificate(r.original);
  return j;
}

inline Json generation_certificate(const GroupContext& G, const GenerationCertificate& cert) {
  Json j;
  j["kind"] = "generation";
  j["schema"] = kCertificateSchema;
  j["group"] = G.spec().to_string();
  j["base"] = G.format(cert.base);
  j["count"] = cert.count();
  j["bound"] = cert.bound;
  j["conjugators"] = format_elements(G, cert.conjugators);
  return j;
}

inline Json growth_certificate(const Subset& X, const GrowthTrace& trace) {
  const auto& G = X.group();
  Json j;
  j["kind"] = "growth";
  j["schema"] = kCertificateSchema;
  j["group"] = G.spec().to_string();
  j["set"] = format_elements(G, X.members());
  Json sizes = Json::array();
  for (const auto& [k, size] : trace.sizes) sizes.push_back(size);
  j["sizes"] = std::move(sizes);
  j["reached_full"] = trace.reached_full;
  return j;
}

inline Json np_scan_certificate(const GroupContext& G, const std::vector<double>& densities, unsigned trials,
                                std::uint64_t seed, const std::vector<ThresholdRow>& rows) {
  Json j;
  j["kind"] = "np-scan";
  j["schema"] = kCertificateSchema;
  j["group"] = G.spec().to_string();
  j["densities"] = densities;
  j["trials"] = trials;
  j["seed"] = seed;
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(Json::array({r.density, r.size, r.successes}));
  j["rows"] = std::move(out);
  return j;
}

struct Verdict {
  bool ok;
  std::string message;
};

namespace detail {

inline Verdict check_decomposition(const Json& j, const std::string& what) {
  const auto dec = decomposition_from_certificate(j);
  if (j.at("N").get<std::size_t>() != dec.N()) return {false, what + ": N disagrees with the conjugator list"};
  if (!replay_matches(dec)) return {false, what + ": replay does not reproduce the recorded product"};
  return {true, what + ": N = " + std::to_string(dec.N()) + (dec.complete ? ", complete" : ", partial")};
}

}  // namespace detail

/// Re-runs the replay a certificate describes.
inline Verdict verify_certificate(const Json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (j.value("schema", 0) != kCertificateSchema) return {false, "unsupported certificate schema"};
  auto group = shared_context(GroupSpec::parse(j.at("group").get<std::string>()));
  const auto& G = *group;

  if (kind == "decomposition") return detail::check_decomposition(j, "decomposition");

  if (kind == "witness-chain") {
    const auto chain = chain_from_json(G, j.at("chain"));
    if (!replay_chain(G, chain)) return {false, "witness chain: a stage does not replay"};
    auto inner = detail::check_decomposition(j.at("working_set"), "working set");
    if (!inner.ok) return inner;
    auto outer = detail::check_decomposition(j.at("original"), "original set");
    if (!outer.ok) return outer;
    if (chain.total() != j.at("working_set").at("N").get<std::size_t>())
      return {false, "witness chain: stage counts do not multiply to N"};
    return {true, "witness chain: " + std::to_string(chain.stages.size()) + " stages, " + inner.message};
  }

  if (kind == "generation") {
    GenerationCertificate cert{G.parse_element(j.at("base").get<std::string>()), parse_elements(G, j.at("conjugators")),
                               j.at("bound").get<std::size_t>()};
    if (cert.count() != j.at("count").get<std::size_t>()) return {false, "generation: count mismatch"};
    if (!replay_generation(group, cert)) return {false, "generation: conjugates do not generate"};
    return {true, "generation: " + std::to_string(cert.count()) + " conjugates generate"};
  }

  if (kind == "growth") {
    Subset Y = Subset::of(group, parse_elements(G, j.at("set")));
    const auto sizes = j.at("sizes").get<std::vector<std::size_t>>();
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (k > 0) Y = subset_product(subset_product(Y, Y), Y);
      if (Y.size() != sizes[k]) return {false, "growth: size mismatch at step " + std::to_string(k)};
    }
    return {true, "growth: " + std::to_string(sizes.size()) + " sizes reproduced"};
  }

  if (kind == "np-scan") {
    const auto densities = j.at("densities").get<std::vector<double>>();
    const auto rows = np_threshold_scan(group, densities, j.at("trials").get<unsigned>(),
                                        j.at("seed").get<std::uint64_t>());
    const auto& recorded = j.at("rows");
    if (recorded.size() != rows.size()) return {false, "np-scan: row count mismatch"};
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (recorded[i].at(1).get<std::size_t>() != rows[i].size ||
          recorded[i].at(2).get<unsigned>() != rows[i].successes)
        return {false, "np-scan: row " + std::to_string(i) + " differs"};
    return {true, "np-scan: " + std::to_string(rows.size()) + " rows reproduced"};
  }

  return {false, "unknown certificate kind '" + kind + "'"};
}

inline std::string certificate_text(const Json& j) { return j.dump(1) + "\n"; }

/// Writes to a sibling temporary file and renames it into place.
inline void write_atomically(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Verdict verify_file(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return verify_certificate(j);
}

}  // namespace produkt
