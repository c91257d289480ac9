#include "motx/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "motx/character.hpp"
#include "motx/errors.hpp"
#include "motx/lindep.hpp"
#include "motx/parser.hpp"
#include "motx/reduction.hpp"

namespace motx {

std::vector<std::uint32_t> primes_in(std::uint32_t lo, std::uint32_t hi) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t n = std::max(2u, lo); n <= hi; ++n) {
        bool prime = n >= 2;
        for (std::uint32_t d = 2; (std::uint64_t)d * d <= n; ++d)
            if (n % d == 0) { prime = false; break; }
        if (prime) out.push_back(n);
    }
    return out;
}

namespace {

// raw engine output with modulo keeps draws portable across library versions
std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n) {
    return n <= 1 ? 0 : rng() % n;
}

void check_cfg(const SweepConfig& cfg) {
    if (cfg.p_min < 3) throw EvalError("p_min must be at least 3");
    if (cfg.p_max < cfg.p_min) throw EvalError("empty prime range");
    if (cfg.f < 1) throw EvalError("residue degree must be positive");
    if (cfg.precision < 2) throw EvalError("precision must be at least 2");
    if (cfg.samples < 1) throw EvalError("need at least one sample point");
    if (cfg.vf_vmax < cfg.vf_vmin) throw EvalError("empty valuation window");
    if (cfg.zz_hi < cfg.zz_lo) throw EvalError("empty integer window");
    if (cfg.vf_digits < 1) throw EvalError("need at least one digit per sample");
    if (cfg.depth < 0) throw EvalError("negative character depth");
}

struct VarProfile {
    Sort sort = Sort::VF;
    long val = 0;
    std::vector<std::uint64_t> digits;
    std::uint64_t rf = 0;
    long long zz = 0;
};
using Profile = std::vector<VarProfile>;

// one stream per (seed, salt): enlarging the sample count keeps a prefix
std::vector<Profile> draw_profiles(const std::vector<VarDecl>& vars, std::uint64_t q,
                                   const SweepConfig& cfg, std::uint64_t salt,
                                   int samples) {
    std::mt19937_64 rng(cfg.seed ^ salt);
    int digits = std::min(cfg.vf_digits, cfg.precision);
    std::vector<Profile> out;
    for (int s = 0; s < samples; ++s) {
        Profile prof;
        for (const auto& v : vars) {
            VarProfile vp;
            vp.sort = v.sort;
            if (v.sort == Sort::VF) {
                vp.val = cfg.vf_vmin +
                         (long)rng_below(rng, (std::uint64_t)(cfg.vf_vmax - cfg.vf_vmin + 1));
                vp.digits.push_back(1 + rng_below(rng, q - 1));
                for (int i = 1; i < digits; ++i) vp.digits.push_back(rng_below(rng, q));
            } else if (v.sort == Sort::RF) {
                vp.rf = rng_below(rng, q);
            } else {
                vp.zz = cfg.zz_lo +
                        (long long)rng_below(rng, (std::uint64_t)(cfg.zz_hi - cfg.zz_lo + 1));
            }
            prof.push_back(std::move(vp));
        }
        out.push_back(std::move(prof));
    }
    return out;
}

Point instantiate(const std::vector<VarDecl>& vars, const Profile& prof,
                  const LocalField& F) {
    const ResidueField& k = F.residue();
    Point x;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const VarProfile& vp = prof[i];
        if (vp.sort == Sort::VF) {
            std::vector<ResidueElem> ds;
            for (std::uint64_t d : vp.digits) ds.push_back(ResidueElem::from_index(k, d));
            x.set(vars[i].name, ValuedElem::from_digits(F, vp.val, ds));
        } else if (vp.sort == Sort::RF) {
            x.set(vars[i].name, ResidueElem::from_index(k, vp.rf));
        } else {
            x.set(vars[i].name, vp.zz);
        }
    }
    return x;
}

constexpr std::uint64_t GRID_SALT = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t YSET_SALT = 0xC2B2AE3D27D4EB4FULL;
constexpr std::uint64_t CVEC_SALT = 0x165667B19E3779F9ULL;

void add_flag(std::string& flags, const std::string& f) {
    if (!flags.empty()) flags += ";";
    flags += f;
}

// probes polar depth over both grids and raises the configured depth to it
int settle_depth(const std::vector<const ExpFunSpec*>& specs, const LocalField& f1,
                 const std::vector<Point>& g1, const LocalField& f2,
                 const std::vector<Point>& g2, const SweepConfig& cfg,
                 std::string& flags) {
    int need = std::max(required_depth(specs, f1, g1, cfg.limits),
                        required_depth(specs, f2, g2, cfg.limits));
    int d = std::max(cfg.depth, need);
    if (d > cfg.depth) add_flag(flags, "depth raised to " + std::to_string(d));
    double family = std::pow((double)f1.q(), d);
    if (family > (double)cfg.limits.max_characters)
        throw CapacityError("character family of size q^" + std::to_string(d) +
                            " exceeds max_characters");
    return d;
}

template <class Fn>
void per_prime(const SweepConfig& cfg, TransferReport& rep, Fn&& fn) {
    for (std::uint32_t p : primes_in(cfg.p_min, cfg.p_max)) {
        try {
            fn(p);
        } catch (const CapacityError& e) {
            ReportRow r;
            r.statement = rep.statement;
            r.p = p;
            r.field = "both";
            r.depth = cfg.depth;
            r.flags = std::string("skipped: ") + e.what();
            rep.rows.push_back(std::move(r));
        }
    }
}

void require_same_vars(const std::vector<const ExpFunSpec*>& specs) {
    for (std::size_t i = 1; i < specs.size(); ++i)
        if (!(specs[i]->vars == specs[0]->vars))
            throw EvalError("specs do not share one variable list");
}

struct BoundData {
    bool hyp_ok = true;
    std::uint64_t min_n = 1;
    bool finite = true;
    std::uint64_t violations = 0;
    std::string first;
};

// sup-style data for |sum_i c_i H_i| <= N |G| over grid x family; c empty
// means a single H with coefficient 1
BoundData bound_on_grid(const std::vector<const ExpFunSpec*>& hs,
                        const std::vector<Rational>& c, const ExpFunSpec& g,
                        const LocalField& F, const std::vector<Point>& grid, int depth,
                        const Limits& lim) {
    BoundData bd;
    auto family = enumerate_characters(F, depth, lim);
    Character psi0 = standard_psi(F);
    for (const Point& x : grid) {
        PolarDecomposition d = polar_decompose_joint(hs, F, x, depth, lim);
        std::vector<std::pair<const ValuedElem*, Cyclotomic>> ent;
        for (const auto& e : d.entries) {
            Cyclotomic hc(0);
            for (std::size_t i = 0; i < hs.size(); ++i)
                hc += (c.empty() ? Cyclotomic(1) : Cyclotomic(c[i])) * e.h[i];
            if (!hc.is_zero()) ent.emplace_back(&e.g, std::move(hc));
        }
        Cyclotomic gv = eval_expfun(g, F, psi0, x, lim);
        Cyclotomic gsq = gv.abs_sq();
        bool gzero = gv.is_zero();
        for (std::size_t pi = 0; pi < family.size(); ++pi) {
            Cyclotomic hv(0);
            for (const auto& [gp, hc] : ent) hv += family[pi](*gp) * hc;
            if (gzero) {
                if (!hv.is_zero()) {
                    bd.hyp_ok = false;
                    bd.finite = false;
                    ++bd.violations;
                    if (bd.first.empty())
                        bd.first = "G = 0, H != 0 at " + x.str() + ", character #" +
                                   std::to_string(pi);
                }
                continue;
            }
            Cyclotomic hsq = hv.abs_sq();
            if ((hsq - gsq).sign_real() > 0) {
                bd.hyp_ok = false;
                if (bd.first.empty())
                    bd.first = "|H| > |G| at " + x.str() + ", character #" + std::to_string(pi);
            }
            // minimal integer m with |H|^2 <= m^2 |G|^2, exact with a float hint
            double r = hsq.to_complex().real() / gsq.to_complex().real();
            std::uint64_t m = std::max<std::uint64_t>(
                1, (std::uint64_t)std::ceil(std::sqrt(std::max(r, 0.0)) - 1e-9));
            auto fits = [&](std::uint64_t n) {
                Cyclotomic n2(Rational(Integer((unsigned long)n) * Integer((unsigned long)n)));
                return (hsq - n2 * gsq).sign_real() <= 0;
            };
            while (!fits(m)) ++m;
            while (m > 1 && fits(m - 1)) --m;
            bd.min_n = std::max(bd.min_n, m);
        }
    }
    return bd;
}

ReportRow bound_row(const std::string& stmt, std::uint32_t p, const std::string& field,
                    int depth, std::uint64_t grid_size, const BoundData& bd,
                    const std::string& flags) {
    ReportRow r;
    r.statement = stmt;
    r.p = p;
    r.field = field;
    r.depth = depth;
    r.grid_size = grid_size;
    r.hypothesis_ok = bd.hyp_ok;
    r.min_n = bd.finite ? bd.min_n : 0;
    r.violations = bd.violations;
    r.flags = flags;
    if (!bd.finite) add_flag(r.flags, "no finite N");
    r.detail = bd.first;
    return r;
}

std::string render_c(const std::vector<Rational>& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ",";
        s += to_string(c[i]);
    }
    return s + ")";
}

std::vector<std::vector<Rational>> c_grid(std::size_t l, const SweepConfig& cfg) {
    std::vector<std::vector<Rational>> cs;
    for (const auto& c : cfg.c_vectors) {
        if (c.size() != l)
            throw EvalError("coefficient tuple " + render_c(c) + " has wrong length");
        cs.push_back(c);
    }
    std::mt19937_64 rng(cfg.seed ^ CVEC_SALT);
    for (int i = 0; i < cfg.c_random; ++i) {
        std::vector<Rational> c;
        for (std::size_t j = 0; j < l; ++j) {
            long num = (long)rng_below(rng, 9) - 4;
            long den = 1 + (long)rng_below(rng, 2);
            Rational r(num, den);
            r.canonicalize();
            c.push_back(r);
        }
        cs.push_back(std::move(c));
    }
    if (cs.empty()) cs.push_back(std::vector<Rational>(l, Rational(1)));
    return cs;
}

} // namespace

std::pair<std::vector<Point>, std::vector<Point>> matched_grids(
    const std::vector<VarDecl>& vars, const LocalField& f1, const LocalField& f2,
    const SweepConfig& cfg) {
    check_cfg(cfg);
    if (&f1.residue() != &f2.residue())
        throw EvalError("fields do not share a residue field");
    auto profiles = draw_profiles(vars, f1.q(), cfg, GRID_SALT * f1.p(), cfg.samples);
    std::vector<Point> g1, g2;
    for (const auto& prof : profiles) {
        g1.push_back(instantiate(vars, prof, f1));
        g2.push_back(instantiate(vars, prof, f2));
    }
    return {std::move(g1), std::move(g2)};
}

std::vector<Point> sample_grid(const std::vector<VarDecl>& vars, const LocalField& F,
                               const SweepConfig& cfg) {
    check_cfg(cfg);
    auto profiles = draw_profiles(vars, F.q(), cfg, GRID_SALT * F.p(), cfg.samples);
    std::vector<Point> g;
    for (const auto& prof : profiles) g.push_back(instantiate(vars, prof, F));
    return g;
}

TransferReport check_bound_transfer(const ExpFunSpec& h, const ExpFunSpec& g,
                                    const SweepConfig& cfg) {
    check_cfg(cfg);
    if (!g.is_ce())
        throw EvalError("the comparison function must have residue-only oscillation");
    require_same_vars({&h, &g});
    TransferReport rep;
    rep.statement = "bound";
    per_prime(cfg, rep, [&](std::uint32_t p) {
        const LocalField& f1 = LocalField::get(FieldKind::EqualChar, p, cfg.f, cfg.precision);
        const LocalField& f2 = LocalField::get(FieldKind::MixedChar, p, cfg.f, cfg.precision);
        auto [g1, g2] = matched_grids(h.vars, f1, f2, cfg);
        std::string flags;
        int d = settle_depth({&h, &g}, f1, g1, f2, g2, cfg, flags);
        BoundData b1 = bound_on_grid({&h}, {}, g, f1, g1, d, cfg.limits);
        BoundData b2 = bound_on_grid({&h}, {}, g, f2, g2, d, cfg.limits);
        rep.rows.push_back(bound_row("bound", p, "eq", d, g1.size(), b1, flags));
        rep.rows.push_back(bound_row("bound", p, "mixed", d, g2.size(), b2, flags));
        rep.ok = rep.ok && b1.hyp_ok && b1.finite && b2.hyp_ok && b2.finite;
    });
    return rep;
}

TransferReport check_bound_transfer_lincomb(const std::vector<const ExpFunSpec*>& hs,
                                            const ExpFunSpec& g, const SweepConfig& cfg) {
    check_cfg(cfg);
    if (hs.empty()) throw EvalError("no functions given");
    if (!g.is_ce())
        throw EvalError("the comparison function must have residue-only oscillation");
    std::vector<const ExpFunSpec*> all = hs;
    all.push_back(&g);
    require_same_vars(all);
    auto cs = c_grid(hs.size(), cfg);

    TransferReport rep;
    rep.statement = "lincomb";
    per_prime(cfg, rep, [&](std::uint32_t p) {
        const LocalField& f1 = LocalField::get(FieldKind::EqualChar, p, cfg.f, cfg.precision);
        const LocalField& f2 = LocalField::get(FieldKind::MixedChar, p, cfg.f, cfg.precision);
        auto [g1, g2] = matched_grids(hs[0]->vars, f1, f2, cfg);
        std::string flags;
        int d = settle_depth(all, f1, g1, f2, g2, cfg, flags);
        std::uint64_t uniform1 = 1, uniform2 = 1;
        bool finite1 = true, finite2 = true, ok = true;
        for (const auto& c : cs) {
            BoundData b1 = bound_on_grid(hs, c, g, f1, g1, d, cfg.limits);
            BoundData b2 = bound_on_grid(hs, c, g, f2, g2, d, cfg.limits);
            std::string stmt = "lincomb c=" + render_c(c);
            rep.rows.push_back(bound_row(stmt, p, "eq", d, g1.size(), b1, flags));
            rep.rows.push_back(bound_row(stmt, p, "mixed", d, g2.size(), b2, flags));
            uniform1 = std::max(uniform1, b1.min_n);
            uniform2 = std::max(uniform2, b2.min_n);
            finite1 = finite1 && b1.finite;
            finite2 = finite2 && b2.finite;
            ok = ok && b1.hyp_ok && b1.finite && b2.hyp_ok && b2.finite;
        }
        ReportRow s1, s2;
        s1.statement = s2.statement = "lincomb-uniform";
        s1.p = s2.p = p;
        s1.field = "eq";
        s2.field = "mixed";
        s1.depth = s2.depth = d;
        s1.grid_size = s2.grid_size = g1.size();
        s1.hypothesis_ok = finite1;
        s2.hypothesis_ok = finite2;
        s1.min_n = finite1 ? uniform1 : 0;
        s2.min_n = finite2 ? uniform2 : 0;
        s1.flags = s2.flags = flags;
        rep.rows.push_back(std::move(s1));
        rep.rows.push_back(std::move(s2));
        rep.ok = rep.ok && ok;
    });
    return rep;
}

TransferReport check_coeff_transfer(const std::vector<const ExpFunSpec*>& hs,
                                    const std::vector<Rational>& c,
                                    const SweepConfig& cfg) {
    check_cfg(cfg);
    if (hs.empty()) throw EvalError("no functions given");
    if (c.size() != hs.size()) throw EvalError("coefficient tuple has wrong length");
    require_same_vars(hs);

    TransferReport rep;
    rep.statement = "coeff";
    per_prime(cfg, rep, [&](std::uint32_t p) {
        const LocalField& f1 = LocalField::get(FieldKind::EqualChar, p, cfg.f, cfg.precision);
        const LocalField& f2 = LocalField::get(FieldKind::MixedChar, p, cfg.f, cfg.precision);
        auto [g1, g2] = matched_grids(hs[0]->vars, f1, f2, cfg);
        std::string flags;
        int d = settle_depth(hs, f1, g1, f2, g2, cfg, flags);

        auto run = [&](const LocalField& F, const std::vector<Point>& grid) {
            ReportRow r;
            r.p = p;
            r.depth = d;
            r.grid_size = grid.size();
            r.flags = flags;
            auto family = enumerate_characters(F, d, cfg.limits);
            for (const Point& x : grid) {
                PolarDecomposition dec = polar_decompose_joint(hs, F, x, d, cfg.limits);
                std::vector<std::pair<const ValuedElem*, Cyclotomic>> ent;
                for (const auto& e : dec.entries) {
                    Cyclotomic hc(0);
                    for (std::size_t i = 0; i < hs.size(); ++i)
                        hc += Cyclotomic(c[i]) * e.h[i];
                    if (!hc.is_zero()) ent.emplace_back(&e.g, std::move(hc));
                }
                for (std::size_t pi = 0; pi < family.size(); ++pi) {
                    Cyclotomic v(0);
                    for (const auto& [gp, hc] : ent) v += family[pi](*gp) * hc;
                    if (!v.is_zero()) {
                        ++r.violations;
                        if (r.detail.empty())
                            r.detail = "nonzero at " + x.str() + ", character #" +
                                       std::to_string(pi);
                    }
                }
            }
            r.hypothesis_ok = (r.violations == 0);
            return r;
        };
        ReportRow r1 = run(f1, g1);
        ReportRow r2 = run(f2, g2);
        r1.statement = r2.statement = "coeff c=" + render_c(c);
        r1.field = "eq";
        r2.field = "mixed";
        bool agree = (r1.hypothesis_ok == r2.hypothesis_ok);
        if (!agree) {
            add_flag(r1.flags, "verdict differs across the pair");
            add_flag(r2.flags, "verdict differs across the pair");
        }
        rep.rows.push_back(std::move(r1));
        rep.rows.push_back(std::move(r2));
        rep.ok = rep.ok && agree;
    });
    return rep;
}

TransferReport check_dependence_transfer(const std::vector<const ExpFunSpec*>& hs,
                                         const SweepConfig& cfg) {
    check_cfg(cfg);
    if (hs.empty()) throw EvalError("no functions given");
    require_same_vars(hs);
    if ((std::size_t)cfg.samples < hs.size())
        throw EvalError("need at least as many sample points as functions");

    std::vector<VarDecl> xvars, yvars;
    for (const auto& v : hs[0]->vars) {
        bool is_y = std::find(cfg.y_vars.begin(), cfg.y_vars.end(), v.name) !=
                    cfg.y_vars.end();
        (is_y ? yvars : xvars).push_back(v);
    }
    for (const auto& name : cfg.y_vars)
        if (std::none_of(hs[0]->vars.begin(), hs[0]->vars.end(),
                         [&](const VarDecl& v) { return v.name == name; }))
            throw EvalError("unknown variable '" + name + "' in the y list");

    TransferReport rep;
    rep.statement = "dependence";
    per_prime(cfg, rep, [&](std::uint32_t p) {
        const LocalField& f1 = LocalField::get(FieldKind::EqualChar, p, cfg.f, cfg.precision);
        const LocalField& f2 = LocalField::get(FieldKind::MixedChar, p, cfg.f, cfg.precision);
        auto xprof = draw_profiles(xvars, f1.q(), cfg, GRID_SALT * p, cfg.samples);
        auto yprof = draw_profiles(yvars, f1.q(), cfg, YSET_SALT * p,
                                   std::max(cfg.y_samples, 1));

        auto merged = [&](const LocalField& F) {
            std::vector<Point> pts;
            for (const auto& yp : yprof) {
                Point y = instantiate(yvars, yp, F);
                for (const auto& xp : xprof) {
                    Point m = instantiate(xvars, xp, F);
                    for (const auto& kv : y.vals) m.set(kv.first, kv.second);
                    pts.push_back(std::move(m));
                }
            }
            return pts;
        };
        std::string flags = "verdicts on sample only";
        int d = settle_depth(hs, f1, merged(f1), f2, merged(f2), cfg, flags);

        // verdicts[field][y][psi]
        auto run = [&](const LocalField& F) {
            std::vector<std::vector<bool>> dep;
            auto family = enumerate_characters(F, d, cfg.limits);
            for (const auto& yp : yprof) {
                Point y = instantiate(yvars, yp, F);
                std::vector<PolarDecomposition> decs;
                for (const auto& xp : xprof) {
                    Point m = instantiate(xvars, xp, F);
                    for (const auto& kv : y.vals) m.set(kv.first, kv.second);
                    decs.push_back(polar_decompose_joint(hs, F, m, d, cfg.limits));
                }
                std::vector<bool> row;
                for (const auto& psi : family) {
                    CycloMatrix mat;
                    for (const auto& dec : decs) {
                        std::vector<Cyclotomic> r(hs.size());
                        for (std::size_t i = 0; i < hs.size(); ++i)
                            r[i] = reconstruct(dec, psi, i);
                        mat.push_back(std::move(r));
                    }
                    row.push_back(dependence_test(mat).verdict == DepVerdict::Dependent);
                }
                dep.push_back(std::move(row));
            }
            return dep;
        };
        auto d1 = run(f1);
        auto d2 = run(f2);

        ReportRow r1, r2;
        r1.statement = r2.statement = "dependence";
        r1.p = r2.p = p;
        r1.field = "eq";
        r2.field = "mixed";
        r1.depth = r2.depth = d;
        r1.grid_size = r2.grid_size = xprof.size();
        for (std::size_t yi = 0; yi < d1.size(); ++yi)
            for (std::size_t pi = 0; pi < d1[yi].size(); ++pi)
                if (d1[yi][pi] != d2[yi][pi]) {
                    ++r1.violations;
                    ++r2.violations;
                    if (r1.detail.empty())
                        r1.detail = r2.detail =
                            "verdicts differ at y sample " + std::to_string(yi) +
                            ", character #" + std::to_string(pi);
                }
        r1.hypothesis_ok = (r1.violations == 0);
        r2.hypothesis_ok = (r2.violations == 0);
        r1.flags = r2.flags = flags;
        rep.ok = rep.ok && r1.hypothesis_ok;
        rep.rows.push_back(std::move(r1));
        rep.rows.push_back(std::move(r2));
    });
    return rep;
}

TransferReport check_rf_zz_rigidity(const ExpFunSpec& h, const SweepConfig& cfg) {
    check_cfg(cfg);
    for (const auto& v : h.vars)
        if (v.sort == Sort::VF)
            throw EvalError("rigidity check requires residue/integer variables only");
    if (!h.is_ce())
        throw EvalError("rigidity check requires residue-only oscillation");

    TransferReport rep;
    rep.statement = "rigidity";
    per_prime(cfg, rep, [&](std::uint32_t p) {
        const LocalField& f1 = LocalField::get(FieldKind::EqualChar, p, cfg.f, cfg.precision);
        const LocalField& f2 = LocalField::get(FieldKind::MixedChar, p, cfg.f, cfg.precision);
        auto [g1, g2] = matched_grids(h.vars, f1, f2, cfg);
        Character psi1 = standard_psi(f1), psi2 = standard_psi(f2);
        ReportRow r;
        r.statement = "rigidity";
        r.p = p;
        r.field = "both";
        r.depth = 0;
        r.grid_size = g1.size();
        for (std::size_t i = 0; i < g1.size(); ++i) {
            Cyclotomic v1 = eval_expfun(h, f1, psi1, g1[i], cfg.limits);
            Cyclotomic v2 = eval_expfun(h, f2, psi2, g2[i], cfg.limits);
            if (v1 != v2) {
                ++r.violations;
                if (r.detail.empty())
                    r.detail = "values differ at " + g1[i].str() + ": " + v1.str() +
                               " vs " + v2.str();
            }
        }
        r.hypothesis_ok = (r.violations == 0);
        rep.ok = rep.ok && r.hypothesis_ok;
        rep.rows.push_back(std::move(r));
    });
    return rep;
}

TransferReport check_factorization(const ExpFunSpec& h, const SweepConfig& cfg) {
    check_cfg(cfg);
    if (!h.is_ce())
        throw EvalError("factorization check requires residue-only oscillation");
    std::vector<ExprPtr> polys;
    for (const auto& s : cfg.profile_polys)
        polys.push_back(parse_term(s, h.vars, Sort::VF));

    TransferReport rep;
    rep.statement = "factorization";
    per_prime(cfg, rep, [&](std::uint32_t p) {
        const LocalField& f1 = LocalField::get(FieldKind::EqualChar, p, cfg.f, cfg.precision);
        const LocalField& f2 = LocalField::get(FieldKind::MixedChar, p, cfg.f, cfg.precision);
        auto [g1, g2] = matched_grids(h.vars, f1, f2, cfg);

        auto run = [&](const LocalField& F, const std::vector<Point>& grid,
                       const char* tag) {
            ReportRow r;
            r.statement = "factorization";
            r.p = p;
            r.field = tag;
            r.depth = 0;
            r.grid_size = grid.size();
            Character psi0 = standard_psi(F);
            std::map<std::string, std::pair<std::string, Cyclotomic>> groups;
            std::uint64_t undetermined = 0;
            for (const Point& x : grid) {
                Env env{&F, &cfg.limits, x};
                std::ostringstream key;
                for (const auto& v : h.vars) {
                    const Value* val = x.find(v.name);
                    if (v.sort == Sort::VF) {
                        const ValuedElem& e = std::get<ValuedElem>(*val);
                        if (e.is_zero())
                            key << "|inf";
                        else
                            key << "|" << e.ord() << "," << e.ac().index();
                    } else if (v.sort == Sort::RF) {
                        key << "|" << std::get<ResidueElem>(*val).index();
                    } else {
                        key << "|" << std::get<long long>(*val);
                    }
                }
                for (const auto& pe : polys) {
                    try {
                        ValuedElem w = eval_vf(pe, env);
                        if (w.is_zero())
                            key << "|inf";
                        else
                            key << "|" << w.ord() << "," << w.ac().index();
                    } catch (const PrecisionError&) {
                        // class not determined at working precision: a unique
                        // token keeps the point out of every group
                        key << "|?" << undetermined++;
                    }
                }
                Cyclotomic v = eval_expfun(h, F, psi0, x, cfg.limits);
                auto it = groups.find(key.str());
                if (it == groups.end()) {
                    groups.emplace(key.str(), std::make_pair(x.str(), v));
                } else if (it->second.second != v) {
                    ++r.violations;
                    if (r.detail.empty())
                        r.detail = "profile collision: {" + it->second.first + "} vs {" +
                                   x.str() + "}";
                }
            }
            if (undetermined)
                add_flag(r.flags, std::to_string(undetermined) +
                                      " profile value(s) undetermined at working precision");
            r.hypothesis_ok = (r.violations == 0);
            return r;
        };
        ReportRow r1 = run(f1, g1, "eq");
        ReportRow r2 = run(f2, g2, "mixed");
        rep.ok = rep.ok && r1.hypothesis_ok && r2.hypothesis_ok;
        rep.rows.push_back(std::move(r1));
        rep.rows.push_back(std::move(r2));
    });
    return rep;
}

} // namespace motx
