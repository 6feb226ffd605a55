#ifndef CSYMP_SCENARIO_HPP
#define CSYMP_SCENARIO_HPP

#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "csymp/cocycle.hpp"
#include "csymp/csymplectic.hpp"
#include "csymp/k3.hpp"
#include "csymp/moser.hpp"
#include "csymp/report.hpp"
#include "csymp/sampling.hpp"
#include "csymp/semiflat.hpp"

namespace csymp {

using Json = nlohmann::ordered_json;

/// Raised for malformed configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cfg {

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key \"" + k + "\"");
}

inline const Json& require(const Json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(where + ": missing key \"" + key + "\"");
    return *it;
}

inline BigRat parse_rat(const Json& j, const std::string& where) {
    try {
        if (j.is_string()) return rat_from_string(j.get<std::string>());
        if (j.is_number_integer()) return BigRat(BigInt(j.get<long long>()));
        if (j.is_number()) return rat_from_double(j.get<double>());
    } catch (const std::exception& e) {
        throw ConfigError(where + ": bad rational (" + e.what() + ")");
    }
    throw ConfigError(where + ": expected a number or \"p/q\" string");
}

inline ComplexD parse_complex(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(where + ": expected [re, im]");
    return {to_double(parse_rat(j[0], where)), to_double(parse_rat(j[1], where))};
}

inline GaussianRational parse_gaussian(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(where + ": expected [re, im]");
    return {parse_rat(j[0], where), parse_rat(j[1], where)};
}

template <class S>
AltForm<S> parse_altform(const Json& j, const std::string& where) {
    reject_unknown_keys(j, {"degree", "dim", "terms"}, where);
    int degree = require(j, "degree", where).get<int>();
    int dim = require(j, "dim", where).get<int>();
    AltForm<S> f(degree, dim);
    for (const auto& term : require(j, "terms", where)) {
        reject_unknown_keys(term, {"idx", "re", "im"}, where + ".terms[]");
        IndexMask mask = 0;
        for (const auto& ix : require(term, "idx", where)) {
            int i = ix.get<int>();  // 1-based in the wire format
            if (i < 1 || i > dim) throw ConfigError(where + ": index out of range");
            mask |= IndexMask{1} << (i - 1);
        }
        GaussianRational c{term.contains("re") ? parse_rat(term["re"], where) : BigRat(0),
                           term.contains("im") ? parse_rat(term["im"], where) : BigRat(0)};
        if constexpr (ScalarTraits<S>::exact) {
            f.add_term(mask, c);
        } else {
            f.add_term(mask, c.to_complex_double());
        }
    }
    return f;
}

inline EtaSpec parse_eta(const Json& j, int n, const std::string& where) {
    reject_unknown_keys(j, {"kind", "terms"}, where);
    std::string kind = require(j, "kind", where).get<std::string>();
    if (kind == "zero") return EtaSpec::zero();
    if (kind == "fubini_study") return EtaSpec::fubini_study();
    if (kind != "polynomial") throw ConfigError(where + ": eta kind must be zero|fubini_study|polynomial");
    std::vector<PolyEtaTerm> terms;
    for (const auto& tj : require(j, "terms", where)) {
        reject_unknown_keys(tj, {"factor", "i", "j", "z_exp", "zbar_exp", "coeff"}, where + ".terms[]");
        PolyEtaTerm t;
        std::string f = require(tj, "factor", where).get<std::string>();
        if (f == "20") t.factor = PolyEtaTerm::Factor::HoloHolo;
        else if (f == "11") t.factor = PolyEtaTerm::Factor::HoloAnti;
        else if (f == "02") t.factor = PolyEtaTerm::Factor::AntiAnti;
        else throw ConfigError(where + ": factor must be \"20\", \"11\" or \"02\"");
        t.i = require(tj, "i", where).get<int>() - 1;
        t.j = require(tj, "j", where).get<int>() - 1;
        t.z_exp.assign(n, 0);
        t.zbar_exp.assign(n, 0);
        if (tj.contains("z_exp")) {
            auto v = tj["z_exp"].get<std::vector<int>>();
            if (static_cast<int>(v.size()) != n) throw ConfigError(where + ": z_exp must have n entries");
            t.z_exp = v;
        }
        if (tj.contains("zbar_exp")) {
            auto v = tj["zbar_exp"].get<std::vector<int>>();
            if (static_cast<int>(v.size()) != n) throw ConfigError(where + ": zbar_exp must have n entries");
            t.zbar_exp = v;
        }
        if (tj.contains("coeff")) t.coeff = parse_gaussian(tj["coeff"], where + ".coeff");
        terms.push_back(std::move(t));
    }
    return EtaSpec::polynomial(std::move(terms));
}

inline SemiFlatModel parse_model(const Json& j, const std::string& where) {
    reject_unknown_keys(j, {"n", "base_radius", "tau", "eta"}, where);
    int n = require(j, "n", where).get<int>();
    double radius = require(j, "base_radius", where).get<double>();
    const Json& tj = require(j, "tau", where);
    if (!tj.is_array() || static_cast<int>(tj.size()) != n * n)
        throw ConfigError(where + ": tau must be a flat row-major list of n*n [re,im] entries");
    Mat<ComplexD> tau(n, n);
    for (int i = 0; i < n * n; ++i) tau.at(i / n, i % n) = parse_complex(tj[i], where + ".tau");
    EtaSpec eta = parse_eta(require(j, "eta", where), n, where + ".eta");
    try {
        return build_model(n, radius, std::move(tau), eta);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace cfg

/// Tolerance lookup: scenario file values overridden by CLI -- then defaults.
class Tolerances {
 public:
    Tolerances() = default;
    Tolerances(const Json& scenario_tols, const std::map<std::string, double>& overrides) {
        if (!scenario_tols.is_null()) {
            if (!scenario_tols.is_object()) throw ConfigError("tolerances: expected an object");
            for (const auto& [k, v] : scenario_tols.items()) t_[k] = v.get<double>();
        }
        for (const auto& [k, v] : overrides) t_[k] = v;
    }
    double get(const std::string& name, double dflt) const {
        auto it = t_.find(name);
        return it == t_.end() ? dflt : it->second;
    }

 private:
    std::map<std::string, double> t_;
};

namespace runner {

// ----------------------------------------------------------------- check_form

template <class S>
std::vector<CheckReport> check_form_impl(const AltForm<S>& om, int n, const Tolerances& tol) {
    using Traits = ScalarTraits<S>;
    std::vector<CheckReport> out;
    PointwiseTolerances pt;
    pt.power_rel = tol.get("csymplectic.power_rel", 1e-12);
    pt.volume_rel = tol.get("csymplectic.volume_rel", 1e-10);
    pt.pivot_rel = tol.get("csymplectic.pivot_rel", 1e-10);
    auto rep = check_pointwise_csymplectic(om, n, pt);
    out.push_back(CheckReport::make_bool("power vanishes: Omega^{n+1} = 0", "C-symplectic condition",
                                         rep.power_vanishes));
    out.push_back(CheckReport::make_bool("volume form nonzero", "C-symplectic condition",
                                         rep.volume_nonzero));
    out.push_back(CheckReport::make_bool("kernel rank = 2n", "kernel rank", rep.kernel_rank == 2 * n));
    out.push_back(CheckReport::make_bool("kernel + conjugate span", "conjugate splitting",
                                         rep.kernel_conjugate_complementary));
    if (!rep.verdict) {
        out.push_back(CheckReport::skip("complex structure recovery (skipped: not C-symplectic)",
                                        "complex structure recovery", 0.0));
        return out;
    }
    double jt = tol.get("complex_structure", Traits::exact ? 0.0 : 1e-10);
    auto J = recover_complex_structure(om);
    const int d = om.dim();
    // J^2 = -id
    auto sq = J * J;
    double res = 0.0;
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            auto want = i == k ? (Traits::real_zero() - Traits::real_one()) : Traits::real_zero();
            res = std::max(res, Traits::real_abs(sq.at(i, k) - want));
        }
    out.push_back(CheckReport::make("J^2 = -id", "complex structure recovery", res, jt));
    // Omega has type (2,0): Omega(Ju, v) = i Omega(u, v), i.e. J^T M = i M
    auto M = om.coefficient_matrix();
    double tres = 0.0;
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            S acc = Traits::zero();
            for (int l = 0; l < d; ++l) acc = acc + Traits::from_real(J.at(l, i)) * M.at(l, k);
            acc = acc - Traits::imaginary_unit() * M.at(i, k);
            tres = std::max(tres, Traits::abs_value(acc));
        }
    out.push_back(CheckReport::make("Omega is (2,0) for J", "complex structure recovery", tres, jt));
    // kernel(Omega) = -i eigenspace of J: J v = -i v on kernel vectors
    double kres = 0.0;
    for (const auto& v : kernel(om, pt.pivot_rel)) {
        for (int i = 0; i < d; ++i) {
            S acc = Traits::zero();
            for (int l = 0; l < d; ++l) acc = acc + Traits::from_real(J.at(i, l)) * v[l];
            acc = acc + Traits::imaginary_unit() * v[i];
            kres = std::max(kres, Traits::abs_value(acc));
        }
    }
    out.push_back(CheckReport::make("kernel is the -i eigenspace of J", "kernel eigenspace", kres, jt));
    return out;
}

inline RunReport run_check_form(const Json& params, const Tolerances& tol) {
    cfg::reject_unknown_keys(params, {"form", "n", "backend"}, "params");
    int n = cfg::require(params, "n", "params").get<int>();
    std::string backend = params.contains("backend") ? params["backend"].get<std::string>() : "float64";
    RunReport r;
    if (backend == "float64") {
        auto f = cfg::parse_altform<ComplexD>(cfg::require(params, "form", "params"), "params.form");
        r.checks = check_form_impl<ComplexD>(f, n, tol);
    } else if (backend == "rational") {
        auto f = cfg::parse_altform<GaussianRational>(cfg::require(params, "form", "params"), "params.form");
        r.checks = check_form_impl<GaussianRational>(f, n, tol);
    } else {
        throw ConfigError("params.backend: must be \"float64\" or \"rational\"");
    }
    return r;
}

// ------------------------------------------------------------ twistor_family

template <class S>
std::vector<CheckReport> twistor_sweep(const SemiFlatModel& model, const std::vector<S>& ts,
                                       const std::vector<RealPoint<S>>& points, const Tolerances& tol) {
    using Traits = ScalarTraits<S>;
    std::vector<CheckReport> out;
    PointwiseTolerances pt;
    pt.power_rel = tol.get("csymplectic.power_rel", 1e-12);
    pt.volume_rel = tol.get("csymplectic.volume_rel", 1e-10);
    pt.pivot_rel = tol.get("csymplectic.pivot_rel", 1e-10);

    double max_power = 0.0, min_margin = -1.0;
    bool all_rank = true, all_split = true, all_volume = true;
    double max_vol_dev = 0.0, max_kernel = 0.0, max_hol = 0.0, max_vanish = 0.0;
    bool exact_ok = true;

    // fixed vanishing-lemma probe: alpha = dz_1, p = 1, q = 0, k = n
    FormField alpha_probe = FormField::wirtinger_covector(0, false, model.base_dim());

    for (const S& t : ts)
        for (const auto& x : points) {
            auto omt = eval_family_form<S>(model, t, x);
            auto rep = check_pointwise_csymplectic(omt, model.n(), pt);
            max_power = std::max(max_power, rep.max_residual);
            all_rank = all_rank && rep.kernel_rank == 2 * model.n();
            all_split = all_split && rep.kernel_conjugate_complementary;
            all_volume = all_volume && rep.volume_nonzero;
            if constexpr (!Traits::exact) {
                AltForm<S> vol = omt.pow(model.n()).wedge(omt.conjugate().pow(model.n()));
                double margin = vol.norm_inf() / std::pow(std::max(1e-300, omt.norm_inf()), 2 * model.n());
                min_margin = min_margin < 0 ? margin : std::min(min_margin, margin);
            }
            exact_ok = exact_ok && rep.power_vanishes;

            auto volr = volume_invariance_check<S>(model, t, x, tol.get("volume_invariance", 1e-10));
            max_vol_dev = std::max(max_vol_dev, volr.measured);
            if (!volr.passed()) exact_ok = false;

            auto ker = kernel_formula_check<S>(model, t, x, tol.get("kernel_formula", 1e-10));
            max_kernel = std::max(max_kernel, ker.measured);
            if (!ker.passed()) exact_ok = false;

            auto hol = holomorphy_check<S>(model, t, x, tol.get("holomorphy", 1e-10));
            max_hol = std::max(max_hol, hol.measured);
            if (!hol.passed()) exact_ok = false;

            auto van = vanishing_lemma_check<S>(model, model.n(), alpha_probe, 1, 0, x,
                                                tol.get("vanishing", 1e-12));
            max_vanish = std::max(max_vanish, van.measured);
        }

    const char* suffix = Traits::exact ? " [rational backend]" : "";
    if constexpr (Traits::exact) {
        out.push_back(CheckReport::make_bool(std::string("Omega_t^{n+1} = 0 over sweep") + suffix,
                                             "family is C-symplectic", max_power == 0.0));
        out.push_back(CheckReport::make_bool(std::string("volume form nonzero over sweep") + suffix,
                                             "family is C-symplectic", all_volume));
    } else {
        out.push_back(CheckReport::make("Omega_t^{n+1} relative residual over sweep",
                                        "family is C-symplectic", max_power, pt.power_rel));
        CheckReport margin;
        margin.name = "volume form margin over sweep";
        margin.anchor = "family is C-symplectic";
        margin.measured = min_margin;
        margin.tolerance = pt.volume_rel;
        margin.status = (all_volume && min_margin > pt.volume_rel) ? CheckStatus::Pass : CheckStatus::Fail;
        out.push_back(margin);
    }
    out.push_back(CheckReport::make_bool(std::string("kernel rank = 2n over sweep") + suffix,
                                         "kernel rank", all_rank));
    out.push_back(CheckReport::make_bool(std::string("kernel + conjugate span over sweep") + suffix,
                                         "conjugate splitting", all_split));
    if constexpr (Traits::exact) {
        out.push_back(CheckReport::make_bool(std::string("volume invariance over sweep") + suffix,
                                             "top-power conservation", max_vol_dev == 0.0));
        out.push_back(CheckReport::make_bool(std::string("kernel basis formula over sweep") + suffix,
                                             "kernel spanning set", max_kernel == 0.0));
        out.push_back(CheckReport::make_bool(std::string("holomorphy over sweep") + suffix,
                                             "fibration holomorphy", max_hol == 0.0));
        out.push_back(CheckReport::make_bool(std::string("vanishing lemma over sweep") + suffix,
                                             "wedge vanishing lemma", max_vanish == 0.0));
    } else {
        out.push_back(CheckReport::make("volume invariance deviation over sweep",
                                        "top-power conservation", max_vol_dev,
                                        tol.get("volume_invariance", 1e-10)));
        out.push_back(CheckReport::make("kernel basis formula residual over sweep",
                                        "kernel spanning set", max_kernel,
                                        tol.get("kernel_formula", 1e-10)));
        out.push_back(CheckReport::make("holomorphy residual over sweep", "fibration holomorphy",
                                        max_hol, tol.get("holomorphy", 1e-10)));
        out.push_back(CheckReport::make("vanishing lemma residual over sweep", "wedge vanishing lemma",
                                        max_vanish, tol.get("vanishing", 1e-12)));
    }
    return out;
}

inline RunReport run_twistor_family(const Json& params, std::uint64_t seed, const Tolerances& tol) {
    cfg::reject_unknown_keys(params, {"model", "t_values", "samples", "backend"}, "params");
    SemiFlatModel model = cfg::parse_model(cfg::require(params, "model", "params"), "params.model");
    int samples = cfg::require(params, "samples", "params").get<int>();
    std::string backend = params.contains("backend") ? params["backend"].get<std::string>() : "float64";

    RunReport r;
    // field-level symbolic checks once per scenario
    r.checks.push_back(CheckReport::make_bool("d(eta) = 0 (symbolic)", "closed deformation form",
                                              model.eta().d().is_zero_symbolic()));
    r.checks.push_back(CheckReport::make_bool("d(Omega_t) = 0 (symbolic)", "closed family",
                                              model.eta_total().d().is_zero_symbolic()));

    SampleRng rng(seed);
    const Json& tv = cfg::require(params, "t_values", "params");
    if (backend == "float64") {
        std::vector<ComplexD> ts;
        for (const auto& tj : tv) ts.push_back(cfg::parse_complex(tj, "params.t_values"));
        std::vector<RealPoint<ComplexD>> pts;
        for (int i = 0; i < samples; ++i) pts.push_back(rng.total_point(model.n(), 0.9 * model.base_radius()));
        auto sweep = twistor_sweep<ComplexD>(model, ts, pts, tol);
        r.checks.insert(r.checks.end(), sweep.begin(), sweep.end());
    } else if (backend == "rational") {
        if (model.eta_kind() == EtaKind::FubiniStudy) {
            // FS coefficients are rational functions, so exact evaluation works
        }
        std::vector<GaussianRational> ts;
        for (const auto& tj : tv) ts.push_back(cfg::parse_gaussian(tj, "params.t_values"));
        std::vector<RealPoint<GaussianRational>> pts;
        BigRat rad(8, 10);
        for (int i = 0; i < samples; ++i)
            pts.push_back(rng.rational_total_point(model.n(), rad * rat_from_double(model.base_radius())));
        auto sweep = twistor_sweep<GaussianRational>(model, ts, pts, tol);
        r.checks.insert(r.checks.end(), sweep.begin(), sweep.end());
    } else {
        throw ConfigError("params.backend: must be \"float64\" or \"rational\"");
    }
    return r;
}

// --------------------------------------------------------------- moser_flow

inline RunReport run_moser_flow(const Json& params, std::uint64_t seed, const Tolerances& tol) {
    cfg::reject_unknown_keys(params,
                             {"model", "alpha", "samples", "steps", "convergence_steps", "sample_radius"},
                             "params");
    SemiFlatModel model = cfg::parse_model(cfg::require(params, "model", "params"), "params.model");
    const Json& aj = cfg::require(params, "alpha", "params");
    cfg::reject_unknown_keys(aj, {"kind", "t1", "j", "c", "terms"}, "params.alpha");
    std::string kind = cfg::require(aj, "kind", "params.alpha").get<std::string>();

    FormField alpha(1, model.base_dim());
    bool exact_translation = false;
    if (kind == "fubini_study") {
        ComplexD t1 = cfg::parse_complex(cfg::require(aj, "t1", "params.alpha"), "params.alpha.t1");
        alpha = fs_primitive(model.n(), t1);
    } else if (kind == "constant") {
        int j = aj.contains("j") ? aj["j"].get<int>() - 1 : 0;
        ComplexD c = aj.contains("c") ? cfg::parse_complex(aj["c"], "params.alpha.c") : ComplexD(1, 0);
        if (j < 0 || j >= model.n()) throw ConfigError("params.alpha.j: out of range");
        alpha = constant_primitive(model.n(), j, c);
        exact_translation = true;
    } else if (kind == "custom") {
        // sum over terms of coeff * z^e * zbar^ebar * dz_i
        for (const auto& tj : cfg::require(aj, "terms", "params.alpha")) {
            cfg::reject_unknown_keys(tj, {"i", "z_exp", "zbar_exp", "coeff"}, "params.alpha.terms[]");
            int i = cfg::require(tj, "i", "params.alpha.terms[]").get<int>() - 1;
            if (i < 0 || i >= model.n()) throw ConfigError("params.alpha.terms[].i: out of range");
            std::vector<int> ze(model.n(), 0), zbe(model.n(), 0);
            if (tj.contains("z_exp")) ze = tj["z_exp"].get<std::vector<int>>();
            if (tj.contains("zbar_exp")) zbe = tj["zbar_exp"].get<std::vector<int>>();
            GaussianRational c = tj.contains("coeff")
                                     ? cfg::parse_gaussian(tj["coeff"], "params.alpha.terms[].coeff")
                                     : GaussianRational(1);
            Expr e = Expr::constant(c) * detail::monomial_expr(ze, zbe);
            alpha = alpha + FormField::wirtinger_covector(i, false, model.base_dim()).scaled(e);
        }
    } else {
        throw ConfigError("params.alpha.kind: must be fubini_study|constant|custom");
    }

    MoserPath path(model, alpha);
    int samples = cfg::require(params, "samples", "params").get<int>();
    int steps = cfg::require(params, "steps", "params").get<int>();
    double srad = params.contains("sample_radius") ? params["sample_radius"].get<double>()
                                                   : 0.8 * model.base_radius();

    SampleRng rng(seed);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < samples; ++i) pts.push_back(rng.total_point(model.n(), srad));

    RunReport r;
    r.checks.push_back(CheckReport::make_bool("alpha is of type (1,0)", "primitive type", true));

    auto flow = integrate_flow(path, pts, steps);
    double ptol = tol.get("pullback", exact_translation ? 1e-14 : 1e-6);
    r.checks.push_back(CheckReport::make("pullback error: phi_1* Omega_1 = Omega_0",
                                         "moser pullback conservation", flow.max_pullback_error, ptol));
    r.checks.push_back(CheckReport::make("z-coordinate drift", "vertical flow field",
                                         flow.max_z_drift, tol.get("z_drift", 1e-9)));
    r.checks.push_back(CheckReport::make("field residual along flow", "moser field equation",
                                         flow.max_field_residual, tol.get("field_residual", 1e-12)));
    if (exact_translation) {
        double ldj = 0.0;
        for (const auto& smp : flow.samples) ldj = std::max(ldj, std::abs(smp.log_det_jac));
        r.checks.push_back(CheckReport::make("log|det J| (translation case)", "volume preservation",
                                             ldj, tol.get("log_det_jac", 1e-6)));
    }

    std::vector<double> sgrid;
    for (int i = 0; i < 10; ++i) sgrid.push_back(i / 9.0);
    std::vector<std::vector<double>> vgrid = pts;
    if (static_cast<int>(vgrid.size()) > 50) vgrid.resize(50);
    r.checks.push_back(verify_verticality(path, sgrid, vgrid, tol.get("verticality", 1e-10)));

    if (params.contains("convergence_steps")) {
        auto cs = params["convergence_steps"].get<std::vector<int>>();
        std::vector<double> errs;
        for (int st : cs) errs.push_back(integrate_flow(path, pts, st).max_pullback_error);
        Json conv = Json::array();
        for (size_t i = 0; i < cs.size(); ++i)
            conv.push_back({{"steps", cs[i]}, {"max_pullback_error", errs[i]}});
        r.details = Json{{"convergence", conv}};
        for (size_t i = 0; i + 1 < errs.size(); ++i) {
            double ratio = errs[i + 1] > 0 ? errs[i] / errs[i + 1] : 0.0;
            CheckReport c;
            c.name = "step-halving error ratio " + std::to_string(cs[i]) + "/" + std::to_string(cs[i + 1]);
            c.anchor = "integration order certification";
            c.measured = ratio;
            c.tolerance = tol.get("convergence_ratio_max", 20.0);
            double lo = tol.get("convergence_ratio_min", 12.0);
            c.status = (ratio >= lo && ratio <= c.tolerance) ? CheckStatus::Pass : CheckStatus::Fail;
            r.checks.push_back(c);
        }
    }
    return r;
}

// ------------------------------------------------------------------ cocycle

inline RunReport run_cocycle(const Json& params, std::uint64_t seed, const Tolerances& tol) {
    cfg::reject_unknown_keys(params, {"t1", "chart_radius", "tau", "samples"}, "params");
    ComplexD t1 = cfg::parse_complex(cfg::require(params, "t1", "params"), "params.t1");
    double radius = params.contains("chart_radius") ? params["chart_radius"].get<double>() : 2.0;
    ComplexD tau = params.contains("tau") ? cfg::parse_complex(params["tau"], "params.tau") : ComplexD(0, 1);
    int samples = params.contains("samples") ? params["samples"].get<int>() : 20;

    P1Atlas atlas;
    try {
        atlas = build_p1_atlas(radius, tau);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    auto c01 = build_cocycle(atlas, t1, 0, 1, samples, seed);
    auto c10 = build_cocycle(atlas, t1, 1, 0, samples, seed + 1);

    RunReport r;
    r.checks.push_back(CheckReport::make_bool("psi preserves Omega (symbolic)", "symplectic automorphism",
                                              c01.omega_preserved_symbolic && c10.omega_preserved_symbolic));
    r.checks.push_back(CheckReport::make("shift holomorphy (Cauchy-Riemann)", "holomorphic fiber shift",
                                         std::max(c01.cr_residual, c10.cr_residual),
                                         tol.get("cocycle_cr", 1e-8)));
    r.checks.push_back(CheckReport::make("flow-built shift matches closed form", "cocycle construction",
                                         std::max(c01.flow_match_residual, c10.flow_match_residual),
                                         tol.get("cocycle_flow_match", 1e-10)));
    r.checks.push_back(cocycle_inverse_check(atlas, c01, c10, samples, seed + 2,
                                             tol.get("cocycle_inverse", 1e-10)));
    r.checks.push_back(CheckReport::make_bool("fiber translations commute", "abelian automorphism group",
                                              cocycle_commutes(c01, c10, {1.1, 0.4})));
    return r;
}

// ------------------------------------------------------------------ k3_line

inline std::vector<NFElem> parse_period_vector(const Json& j, const NumberFieldPtr& field,
                                               const std::string& where) {
    if (!j.is_array() || j.size() != 22) throw ConfigError(where + ": expected 22 entries");
    std::vector<NFElem> out;
    for (const auto& e : j) {
        if (e.is_array()) {
            if (!field) throw ConfigError(where + ": coefficient vectors require a field");
            std::vector<BigRat> c(field->degree(), BigRat(0));
            if (e.size() > c.size()) throw ConfigError(where + ": coefficient vector too long");
            for (size_t i = 0; i < e.size(); ++i) c[i] = cfg::parse_rat(e[i], where);
            out.emplace_back(field, std::move(c));
        } else {
            out.emplace_back(cfg::parse_rat(e, where));
        }
    }
    return out;
}

inline RunReport run_k3_line(const Json& params, const Tolerances& tol) {
    (void)tol;  // all lattice checks are exact
    cfg::reject_unknown_keys(params, {"line", "d_range", "epsilon", "height_bound", "extra_t"}, "params");
    const Json& lj = cfg::require(params, "line", "params");
    cfg::reject_unknown_keys(lj, {"a", "b", "ell", "field"}, "params.line");

    NumberFieldPtr field;
    if (lj.contains("field")) {
        const Json& fj = lj["field"];
        cfg::reject_unknown_keys(fj, {"min_poly", "root_interval"}, "params.line.field");
        std::vector<BigInt> mp;
        for (const auto& c : cfg::require(fj, "min_poly", "params.line.field"))
            mp.emplace_back(c.get<long long>());
        const Json& iv = cfg::require(fj, "root_interval", "params.line.field");
        if (!iv.is_array() || iv.size() != 2) throw ConfigError("params.line.field.root_interval: expected [lo, hi]");
        try {
            field = std::make_shared<const NumberField>(std::move(mp),
                                                        cfg::parse_rat(iv[0], "root_interval"),
                                                        cfg::parse_rat(iv[1], "root_interval"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("params.line.field: ") + e.what());
        }
    }

    TwistorLine line;
    line.period.a = parse_period_vector(cfg::require(lj, "a", "params.line"), field, "params.line.a");
    line.period.b = parse_period_vector(cfg::require(lj, "b", "params.line"), field, "params.line.b");
    {
        const Json& ej = cfg::require(lj, "ell", "params.line");
        if (!ej.is_array() || ej.size() != 22) throw ConfigError("params.line.ell: expected 22 integers");
        for (const auto& e : ej) line.ell.emplace_back(e.get<long long>());
    }

    auto dr = cfg::require(params, "d_range", "params").get<std::vector<long>>();
    if (dr.size() != 2 || dr[0] < 1 || dr[1] < dr[0]) throw ConfigError("params.d_range: expected [lo, hi]");
    BigRat epsilon = params.contains("epsilon") ? cfg::parse_rat(params["epsilon"], "params.epsilon")
                                                : BigRat(1, 100);
    long height_bound = params.contains("height_bound") ? params["height_bound"].get<long>() : 1000000;

    RunReport r;
    auto L = k3_gram();

    // lattice integrity
    r.checks.push_back(CheckReport::make_bool("K3 lattice determinant = -1", "even unimodular lattice",
                                              det_bareiss(L.gram) == -1));
    bool even = true;
    for (int i = 0; i < 22; ++i) even = even && L.gram[i][i] % 2 == 0;
    r.checks.push_back(CheckReport::make_bool("K3 lattice even", "even unimodular lattice", even));
    auto [pos, neg, zero] = inertia(L.gram);
    r.checks.push_back(CheckReport::make_bool("K3 lattice signature (3,19)", "lattice signature",
                                              pos == 3 && neg == 19 && zero == 0));

    // period and line validation
    auto pv = period_validate(L, line);
    r.checks.insert(r.checks.end(), pv.begin(), pv.end());

    // per-d family
    bool all_prim = true, all_ell = true, all_pos = true, all_disc = true, all_td = true,
         all_contain = true;
    std::set<std::string> discs;
    Json per_d = Json::array();
    for (long d = dr[0]; d <= dr[1]; ++d) {
        auto E = embed_hd(static_cast<int>(d));
        bool prim = primitivity_check(E);
        all_prim = all_prim && prim;
        all_ell = all_ell && E.vectors[0] == line.ell;
        IVec vw(22);
        for (int i = 0; i < 22; ++i) vw[i] = E.vectors[0][i] + E.vectors[1][i];
        all_pos = all_pos && q_eval(L, vw, vw) == 2 * d;
        BigInt disc = discriminant(E.induced);
        all_disc = all_disc && disc == -BigInt(d) * BigInt(d);
        std::ostringstream dstr;
        dstr << disc;
        discs.insert(dstr.str());

        Json rec;
        rec["d"] = d;
        rec["disc_lambda"] = dstr.str();
        rec["primitive"] = prim;
        auto td = solve_td(L, line, E);
        if (!td) {
            all_td = false;
            rec["t_d"] = nullptr;
            rec["ns_rank"] = nullptr;
            rec["containment"] = false;
        } else {
            rec["t_d"] = Json::array({td->first.to_string(), td->second.to_string()});
            if (td->first.is_rational() && td->second.is_rational()) {
                auto ns = neron_severi(L, line, td->first.rational_value(), td->second.rational_value());
                bool contain = ns_contains(ns, E.vectors[0]) && ns_contains(ns, E.vectors[1]);
                all_contain = all_contain && contain;
                rec["ns_rank"] = imat_rows(ns.basis);
                rec["containment"] = contain;
            } else {
                rec["ns_rank"] = nullptr;
                rec["containment"] = nullptr;
            }
        }
        per_d.push_back(std::move(rec));
    }
    r.checks.push_back(CheckReport::make_bool("H(d) embeddings primitive", "primitive embedding", all_prim));
    r.checks.push_back(CheckReport::make_bool("ell lies in every Lambda_d", "line class membership", all_ell));
    r.checks.push_back(CheckReport::make_bool("q(v+w) = 2d > 0", "positive class in Lambda_d", all_pos));
    r.checks.push_back(CheckReport::make_bool("disc(Lambda_d) = -d^2", "discriminant separation", all_disc));
    r.checks.push_back(CheckReport::make_bool("discriminants pairwise distinct", "discriminant separation",
                                              discs.size() == static_cast<size_t>(dr[1] - dr[0] + 1)));
    r.checks.push_back(CheckReport::make_bool("t_d solvable on the line", "orthogonality parameter", all_td));
    r.checks.push_back(CheckReport::make_bool("Lambda_d contained in NS(t_d)", "Neron-Severi containment",
                                              all_contain));

    // ell in NS(t) for extra rational t
    std::vector<std::pair<BigRat, BigRat>> extra;
    if (params.contains("extra_t")) {
        for (const auto& tj : params["extra_t"])
            extra.emplace_back(cfg::parse_rat(tj[0], "extra_t"), cfg::parse_rat(tj[1], "extra_t"));
    } else {
        extra = {{BigRat(1, 2), BigRat(0)},  {BigRat(-1, 3), BigRat(1, 5)}, {BigRat(2), BigRat(-1)},
                 {BigRat(0), BigRat(3, 7)},  {BigRat(5), BigRat(1, 2)},     {BigRat(-7, 4), BigRat(0)},
                 {BigRat(1, 9), BigRat(1, 9)}, {BigRat(-2, 5), BigRat(3, 8)}, {BigRat(4), BigRat(-4)},
                 {BigRat(22, 7), BigRat(-1, 13)}};
    }
    bool all_ell_ns = true;
    for (const auto& [tr, ti] : extra) {
        auto ns = neron_severi(L, line, tr, ti);
        all_ell_ns = all_ell_ns && ns_contains(ns, line.ell);
    }
    r.checks.push_back(CheckReport::make_bool("ell in NS(t) for sampled t", "line class in Neron-Severi",
                                              all_ell_ns));

    // projectivity search
    auto hit = projectivity_search(L, line, epsilon, height_bound);
    Json pj;
    if (hit) {
        bool qx_pos = q_eval(L, hit->x, hit->x) > 0;
        NFElem mod2 = hit->t_re * hit->t_re + hit->t_im * hit->t_im;
        bool teps = !((mod2 - NFElem(epsilon * epsilon)).sign() > 0);
        r.checks.push_back(CheckReport::make_bool("projectivity: q(x) > 0 and |t| <= epsilon",
                                                  "projective nearby parameter", qx_pos && teps));
        Json xs = Json::array();
        for (const auto& c : hit->x) {
            std::ostringstream os;
            os << c;
            xs.push_back(os.str());
        }
        pj = Json{{"x", xs},
                  {"t", Json::array({hit->t_re.to_string(), hit->t_im.to_string()})},
                  {"structured_n", hit->structured_n}};
    } else {
        r.checks.push_back(CheckReport::make_bool("projectivity: q(x) > 0 and |t| <= epsilon",
                                                  "projective nearby parameter", false));
        pj = Json();
    }

    r.details = Json{{"per_d", per_d}, {"projectivity", pj}};
    return r;
}

}  // namespace runner

/// Parses, validates and dispatches one scenario document.
inline RunReport run_scenario(const Json& scenario, const std::map<std::string, double>& overrides = {}) {
    auto t0 = std::chrono::steady_clock::now();
    cfg::reject_unknown_keys(scenario, {"schema_version", "kind", "seed", "tolerances", "params"},
                             "scenario");
    int sv = cfg::require(scenario, "schema_version", "scenario").get<int>();
    if (sv != kSchemaVersion)
        throw ConfigError("scenario.schema_version: unsupported version " + std::to_string(sv));
    std::string kind = cfg::require(scenario, "kind", "scenario").get<std::string>();
    std::uint64_t seed = scenario.contains("seed") ? scenario["seed"].get<std::uint64_t>() : 0;
    Tolerances tol(scenario.contains("tolerances") ? scenario["tolerances"] : Json(), overrides);
    const Json& params = cfg::require(scenario, "params", "scenario");

    RunReport r;
    if (kind == "check_form") r = runner::run_check_form(params, tol);
    else if (kind == "twistor_family") r = runner::run_twistor_family(params, seed, tol);
    else if (kind == "moser_flow") r = runner::run_moser_flow(params, seed, tol);
    else if (kind == "cocycle") r = runner::run_cocycle(params, seed, tol);
    else if (kind == "k3_line") r = runner::run_k3_line(params, tol);
    else throw ConfigError("scenario.kind: unknown kind \"" + kind + "\"");

    r.scenario_echo = scenario;
    auto t1 = std::chrono::steady_clock::now();
    r.wall_time_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
    return r;
}

inline RunReport run_scenario_file(const std::string& path,
                                   const std::map<std::string, double>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("scenario file is not valid JSON: " + std::string(e.what()));
    }
    return run_scenario(j, overrides);
}

}  // namespace csymp

#endif  // CSYMP_SCENARIO_HPP
