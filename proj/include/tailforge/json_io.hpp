#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "closed_forms.hpp"
#include "estimates.hpp"
#include "exact.hpp"
#include "regime.hpp"
#include "saddle.hpp"
#include "sequences.hpp"

namespace tailforge {

using nlohmann::json;

inline json sequence_to_json(const Sequence& seq) {
    json j;
    j["family"] = seq.family();
    json p = json::object();
    for (const auto& [name, value] : seq.params()) p[name] = value;
    j["params"] = p;
    if (auto* e = dynamic_cast<const ExplicitListSeq*>(&seq))
        j["values"] = e->values();
    if (auto* r = dynamic_cast<const RecordsListSeq*>(&seq))
        j["alphas"] = r->alphas();
    return j;
}

inline SequencePtr sequence_from_json(const json& j) {
    if (!j.contains("family"))
        throw parameter_domain_error("sequence JSON: missing family");
    std::string fam = j.at("family").get<std::string>();
    json p = j.value("params", json::object());
    auto need = [&](const char* name) {
        if (!p.contains(name))
            throw parameter_domain_error(std::string("sequence JSON: missing ") +
                                         fam + " parameter " + name);
        return p.at(name).get<double>();
    };
    if (fam == "polynomial")
        return std::make_shared<PolynomialSeq>(need("c"), need("beta"));
    if (fam == "stretched-exp")
        return std::make_shared<StretchedExpSeq>(need("c"), need("beta"));
    if (fam == "gnedin-sinh")
        return std::make_shared<GnedinSinhSeq>(need("lambda"));
    if (fam == "gnedin-cosh")
        return std::make_shared<GnedinCoshSeq>(need("lambda"));
    if (fam == "ginibre-gamma")
        return std::make_shared<GinibreGammaSeq>(need("t"));
    if (fam == "records-geom")
        return std::make_shared<RecordsGeomSeq>(need("q"));
    if (fam == "poissonized-range")
        return std::make_shared<PoissonizedRangeSeq>(
            need("t"), need("a"), need("q"),
            static_cast<RangeVariant>(static_cast<int>(need("variant"))),
            static_cast<long>(need("j")));
    if (fam == "explicit-list")
        return std::make_shared<ExplicitListSeq>(
            j.at("values").get<std::vector<double>>());
    if (fam == "records-list")
        return std::make_shared<RecordsListSeq>(
            j.at("alphas").get<std::vector<double>>());
    throw unsupported_family_error("sequence JSON: unknown family " + fam);
}

inline json to_json(const SaddleSolution& s) {
    return {{"n", s.n},
            {"s", s.s},
            {"psi", s.psi},
            {"psi_prime", s.psi_prime},
            {"psi_double_prime", s.psi_double_prime},
            {"residual", s.residual},
            {"method",
             s.method == SaddleMethod::numeric ? "numeric" : "family-formula"}};
}

inline json to_json(const C0Result& c) {
    return {{"value", c.value}, {"error_bound", c.error_bound}, {"M", c.M}};
}

inline json to_json(const RegimeReport& r) {
    json grid = json::array();
    for (const auto& pt : r.grid)
        grid.push_back({{"n", pt.n},
                        {"s", pt.s},
                        {"psi_double_prime", pt.psi2},
                        {"head_sum", pt.head_sum},
                        {"tail_sum", pt.tail_sum.value},
                        {"tail_error_bound", pt.tail_sum.error_bound}});
    json j = {{"label", regime_name(r.label)}, {"grid", grid}};
    if (r.c_data) {
        json c = {{"p", r.c_data->p},
                  {"q", r.c_data->q},
                  {"drift_p1", r.c_data->drift_p1},
                  {"drift_q0", r.c_data->drift_q0}};
        if (r.c_data->c0) c["c0"] = to_json(*r.c_data->c0);
        j["c_limits"] = c;
    }
    return j;
}

inline json to_json(const TailEstimate& e) {
    json j = {{"n", e.n},
              {"regime", regime_name(e.label)},
              {"log_point", e.log_point},
              {"log_tail", e.log_tail},
              {"saddle", to_json(e.saddle)}};
    if (e.c0_used) j["c0_used"] = *e.c0_used;
    return j;
}

inline json to_json(const ExplicitAsymptotic& a) {
    json terms = json::array();
    for (const auto& t : a.terms)
        terms.push_back({{"name", t.name}, {"value", t.value}});
    return {{"case", std::string(1, a.family)},
            {"c", a.c},
            {"beta", a.beta},
            {"n", a.n},
            {"terms", terms},
            {"log_value", a.log_value}};
}

inline json to_json(const McEstimate& m) {
    return {{"n", m.n},
            {"s", m.s},
            {"log_point_estimate", m.log_point_estimate},
            {"std_error_log", m.std_error_log},
            {"samples", m.samples},
            {"seed", m.seed},
            {"hits", m.hits},
            {"mean_y", m.mean_y}};
}

inline json to_json(const LogPmf& t) {
    return {{"log_p", t.log_p},
            {"K_used", t.K_used},
            {"stabilization_delta", t.stabilization_delta},
            {"tail_drop_bound", t.tail_drop_bound}};
}

}  // namespace tailforge
