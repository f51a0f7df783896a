#pragma once

// JSON views of the report structs. Field names are stable; doubles keep
// full round-trip precision.

#include "rkm/diagnostics.hpp"
#include "rkm/graph.hpp"
#include "rkm/model.hpp"
#include "rkm/noise.hpp"
#include "rkm/roughpath.hpp"

#include <json.hpp>

namespace rkm::report {

using Json = nlohmann::ordered_json;

Json to_json(const Eigen::VectorXd& v);
Json to_json(const graph::GraphSpectrum& s);
Json to_json(const graph::CheegerBounds& b);
Json to_json(const model::HypothesisReport& h);
Json to_json(const noise::KolmogorovReport& k);
Json to_json(const roughpath::EnEstimate& e);
Json to_json(const diagnostics::LyapunovReport& r);
Json to_json(const diagnostics::DecayFit& f);
Json to_json(const diagnostics::RateBoundReport& r);
Json to_json(const diagnostics::BasinReport& r);
Json to_json(const diagnostics::ThetaInfinityReport& r);
Json to_json(const diagnostics::SplittingReport& r);
Json to_json(const diagnostics::FrequencyReport& r);
Json to_json(const diagnostics::SyncReport& r);
Json config_json(const model::SystemConfig& cfg);

/// Graph summary: size, weights sign, components, spectrum, balance and,
/// when admissible, Cheeger bounds (otherwise the refusal reason).
Json graph_info(const graph::SignedGraph& g);

}  // namespace rkm::report
