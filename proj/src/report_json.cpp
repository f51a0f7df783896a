#include "rkm/report_json.hpp"

#include "rkm/error.hpp"

namespace rkm::report {

Json to_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json to_json(const graph::GraphSpectrum& s) {
    return Json{{"eigenvalues", to_json(s.eigenvalues)},
                {"fiedler", s.fiedler},
                {"componentCount", s.componentCount},
                {"zeroTolerance", s.zeroTolerance}};
}

Json to_json(const graph::CheegerBounds& b) {
    return Json{{"h", b.h},
                {"maxDegree", b.maxDegree},
                {"lower", b.lower},
                {"fiedler", b.fiedler},
                {"upper", b.upper},
                {"refinedUpperOnH", b.refinedUpperOnH},
                {"sandwichHolds", b.sandwichHolds},
                {"refinedHolds", b.refinedHolds}};
}

Json to_json(const model::HypothesisReport& h) {
    Json j{{"A", h.A},         {"AI", h.AI},         {"AII", h.AII},       {"AIII", h.AIII},
           {"B", h.B},         {"HG", h.HG},         {"HGplus", h.HGplus}, {"HGIplus", h.HGIplus},
           {"HWplus", h.HWplus}, {"HGII", h.HGII},   {"symmetric", h.symmetric},
           {"nonnegative", h.nonnegative}, {"connected", h.connected}};
    j["components"] = h.components;
    if (h.partition) {
        j["partition"] = h.partition->side;
    } else {
        j["partition"] = nullptr;
    }
    j["fiedler"] = h.fiedler;
    j["CG"] = h.CG;
    j["d"] = h.d;
    j["warnings"] = h.warnings;
    return j;
}

Json to_json(const noise::KolmogorovReport& k) {
    return Json{{"p", k.p},           {"q", k.q},
                {"scales", k.scales}, {"moments", k.moments},
                {"slope", k.slope},   {"intercept", k.intercept},
                {"threshold", k.threshold}, {"pass", k.pass}};
}

Json to_json(const roughpath::EnEstimate& e) {
    return Json{{"mean", e.mean}, {"standardError", e.standardError}, {"trials", e.trials}, {"gamma", e.gamma}};
}

Json to_json(const diagnostics::LyapunovReport& r) {
    return Json{{"worstMargin", r.worstMargin}, {"d", r.d},
                {"c2delta", r.c2delta},         {"fiedler", r.fiedler},
                {"samples", r.samples},         {"violations", r.violations},
                {"tolerance", r.tolerance}};
}

Json to_json(const diagnostics::DecayFit& f) {
    return Json{{"rate", f.rate}, {"rSquared", f.rSquared}, {"tailWindow", {f.tLo, f.tHi}}, {"points", f.points}};
}

Json to_json(const diagnostics::RateBoundReport& r) {
    return Json{{"d", r.d},           {"c2delta", r.c2delta}, {"fiedler", r.fiedler},
                {"cG", r.cG},         {"enEstimate", r.enEstimate}, {"cp", r.cp},
                {"bound", r.bound},   {"positive", r.positive}};
}

Json to_json(const diagnostics::BasinReport& r) {
    return Json{{"r", r.r},
                {"argminN", r.argminN},
                {"eta", r.eta},
                {"lipschitz", r.lipschitz},
                {"cG", r.cG},
                {"threshold", r.threshold},
                {"counts", r.counts},
                {"values", r.values},
                {"rStar", "not estimated"},
                {"note", r.note}};
}

Json to_json(const diagnostics::ThetaInfinityReport& r) {
    return Json{{"theta0", r.theta0},
                {"integral", r.integral},
                {"value", r.value},
                {"rotation", r.rotation},
                {"unitIncrements", r.unitIncrements}};
}

Json to_json(const diagnostics::SplittingReport& r) {
    return Json{{"verdict", r.verdict},
                {"maxDeviation", r.maxDeviation},
                {"side1Deviation", r.side1Deviation},
                {"side2Deviation", r.side2Deviation},
                {"commonPhase", r.commonPhase}};
}

Json to_json(const diagnostics::FrequencyReport& r) {
    Json j{{"deltaMax", r.deltaMax}, {"deltaBelowHalfPi", r.deltaBelowHalfPi}};
    j["fit"] = r.fit ? to_json(*r.fit) : Json(nullptr);
    j["alreadySynchronized"] = r.alreadySynchronized;
    j["rateBound"] = r.rateBound;
    j["rateOk"] = r.rateOk;
    j["verdict"] = r.verdict;
    j["terminalSpread"] = r.terminalSpread;
    j["note"] = r.note;
    return j;
}

Json to_json(const diagnostics::SyncReport& r) {
    Json j;
    if (r.fit) {
        j["fittedRate"] = r.fit->rate;
        j["rSquared"] = r.fit->rSquared;
        j["tailWindow"] = {r.fit->tLo, r.fit->tHi};
    } else {
        j["fittedRate"] = nullptr;
        j["fitError"] = r.fitError;
    }
    j["terminalDeviation"] = r.terminalDeviation;
    j["conservationResidual"] = r.conservationResidual;
    j["thetaInfinity"] = r.thetaInfinity ? Json(*r.thetaInfinity) : Json(nullptr);
    j["deltaSup"] = r.deltaSup;
    Json v = Json::object();
    for (const auto& [name, ok] : r.verdicts) v[name] = ok;
    j["verdicts"] = v;
    return j;
}

Json config_json(const model::SystemConfig& cfg) {
    return Json{{"K", cfg.K},
                {"N", cfg.N()},
                {"sigma", cfg.sigma},
                {"nTilde", cfg.nTilde},
                {"hurst", cfg.fbm.hurst},
                {"m", cfg.fbm.m},
                {"identicalComponents", cfg.fbm.identicalComponents},
                {"noiseKind", model::to_string(cfg.noiseKind)},
                {"T", cfg.T},
                {"dt", cfg.dt},
                {"seed", cfg.seed},
                {"delta", cfg.delta},
                {"naturalFreqs", to_json(cfg.naturalFreqs)}};
}

Json graph_info(const graph::SignedGraph& g) {
    Json j{{"n", g.n()}, {"nonnegative", g.isNonnegative()}};
    const auto labels = graph::connected_components(g);
    j["componentLabels"] = labels;
    j["components"] = graph::component_count(labels);
    j["spectrum"] = to_json(graph::spectrum(g));
    if (const auto part = graph::balance_partition(g)) {
        j["balanced"] = true;
        j["partition"] = part->side;
    } else {
        j["balanced"] = false;
        j["partition"] = nullptr;
    }
    try {
        j["cheeger"] = to_json(graph::cheeger_bounds(g));
    } catch (const std::exception& e) {
        j["cheeger"] = Json{{"refused", e.what()}};
    }
    return j;
}

}  // namespace rkm::report
