#include "motx/reduction.hpp"

#include <algorithm>
#include <map>

#include "motx/errors.hpp"

namespace motx {

namespace {

// one oscillating member before grouping
struct OscMember {
    ValuedElem g;
    ResidueElem e;
    Rational weight;    // H_i(x)
    std::size_t spec;
};

// All oscillating members of all specs at x (specs whose ambient excludes x
// contribute none).  depth < 0 skips the depth check.
std::vector<OscMember> collect_osc(const std::vector<const ExpFunSpec*>& specs,
                                   const LocalField& F, const Point& x, int depth,
                                   const Limits& lim) {
    const ResidueField& k = F.residue();
    std::vector<OscMember> out;
    for (std::size_t si = 0; si < specs.size(); ++si) {
        const ExpFunSpec& spec = *specs[si];
        Env env{&F, &lim, x};
        if (spec.ambient && !eval_formula(spec.ambient, env)) continue;
        for (const auto& s : spec.summands) {
            Rational hi = eval_summand_h(s, env);
            auto tuples = enum_set(s.osc_vars, s.osc_set, env);
            Env yenv = env;
            for (const auto& tup : tuples) {
                for (std::size_t i = 0; i < s.osc_vars.size(); ++i)
                    yenv.bindings.set(s.osc_vars[i].name, tup[i]);
                ValuedElem g = s.g.empty()
                                   ? ValuedElem::zero(F)
                                   : eval_vf(resolve_case(s.g, yenv, "g case").value, yenv);
                if (depth >= 0 && !g.is_zero() && g.ord() < -depth)
                    throw DepthError("g-value of valuation " + std::to_string(g.ord()) +
                                         " needs character depth " + std::to_string(-g.ord()),
                                     (int)-g.ord());
                if (!g.is_zero() && g.ord() < 0 && g.ord() + g.guaranteed() < 0)
                    throw PrecisionError("class of a g-value modulo the valuation ring "
                                         "is not determined at working precision");
                ResidueElem e = s.e ? eval_rf(s.e, yenv) : ResidueElem(k);
                out.push_back({g, e, hi, si});
            }
        }
    }
    return out;
}

// the residue of an integral element (digit at exponent 0)
ResidueElem bar(const ValuedElem& v, const ResidueField& k) {
    if (v.is_zero() || v.ord() > 0) return ResidueElem(k);
    if (v.ord() == 0) return v.ac();
    throw Error("internal: shift is not integral");
}

PolarDecomposition decompose(const std::vector<const ExpFunSpec*>& specs,
                             const LocalField& F, const Point& x, int depth,
                             const Limits& lim) {
    if (depth < 0) throw EvalError("negative character depth");
    const ResidueField& k = F.residue();
    auto members = collect_osc(specs, F, x, depth, lim);

    // group by the class mod O (the digits at negative exponents)
    using Key = std::vector<std::pair<long, std::uint64_t>>;
    std::map<Key, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < members.size(); ++i)
        classes[members[i].g.polar_key()].push_back(i);

    PolarDecomposition out;
    out.x = x;
    out.depth = depth;
    for (const auto& [key, idxs] : classes) {
        // representative: zero for the integral class, else the mean of the
        // distinct g-values (the shift stays integral because the count is
        // prime to p)
        ValuedElem rep = ValuedElem::zero(F);
        if (!key.empty()) {
            std::vector<const ValuedElem*> distinct;
            for (std::size_t i : idxs) {
                bool seen = false;
                for (const ValuedElem* d : distinct)
                    if (*d == members[i].g) { seen = true; break; }
                if (!seen) distinct.push_back(&members[i].g);
            }
            if (distinct.size() % F.p() == 0)
                throw EvalError("mean shift impossible: " + std::to_string(distinct.size()) +
                                " grouped values and p = " + std::to_string(F.p()) +
                                " divides their count");
            ValuedElem sum = ValuedElem::zero(F);
            for (const ValuedElem* d : distinct) sum = sum + *d;
            rep = sum / ValuedElem::from_integer(F, Integer((unsigned long)distinct.size()));
        }

        PolarEntry entry;
        entry.g = rep;
        entry.h.assign(specs.size(), Cyclotomic(0));
        for (std::size_t i : idxs) {
            // psi(g + e) = psi(rep) * e(tr(bar(g - rep) + e)) for every
            // family member, since all of them restrict identically to O
            ResidueElem shift = (members[i].g == rep)
                                    ? ResidueElem(k)
                                    : bar(members[i].g - rep, k);
            entry.h[members[i].spec] +=
                members[i].weight * residue_character(shift + members[i].e);
        }
        bool all_zero = std::all_of(entry.h.begin(), entry.h.end(),
                                    [](const Cyclotomic& c) { return c.is_zero(); });
        if (!all_zero) out.entries.push_back(std::move(entry));
    }
    return out;
}

Cyclotomic sum_pair_products(const PolarDecomposition& d, std::size_t i, std::size_t s) {
    Cyclotomic acc(0);
    for (const auto& e : d.entries) acc += e.h[i] * e.h[s].conj();
    return acc;
}

} // namespace

PolarDecomposition polar_decompose(const ExpFunSpec& spec, const LocalField& F,
                                   const Point& x, int depth, const Limits& lim) {
    return decompose({&spec}, F, x, depth, lim);
}

PolarDecomposition polar_decompose_joint(const std::vector<const ExpFunSpec*>& specs,
                                         const LocalField& F, const Point& x, int depth,
                                         const Limits& lim) {
    if (specs.empty()) throw EvalError("no specs to decompose");
    return decompose(specs, F, x, depth, lim);
}

int required_depth(const std::vector<const ExpFunSpec*>& specs, const LocalField& F,
                   const std::vector<Point>& sample, const Limits& lim) {
    int d = 0;
    for (const Point& x : sample)
        for (const auto& m : collect_osc(specs, F, x, -1, lim))
            if (!m.g.is_zero() && m.g.ord() < -d) d = (int)-m.g.ord();
    return d;
}

Cyclotomic reconstruct(const PolarDecomposition& d, const Character& psi, std::size_t i) {
    Cyclotomic acc(0);
    for (const auto& e : d.entries) acc += psi(e.g) * e.h[i];
    return acc;
}

TildeResult tilde_H(const ExpFunSpec& spec, const LocalField& F,
                    const std::vector<Point>& sample, int depth, const Limits& lim) {
    TildeResult res;
    std::vector<Cyclotomic> sums;
    for (const Point& x : sample) {
        PolarDecomposition d = polar_decompose(spec, F, x, depth, lim);
        res.nprime = std::max<std::uint64_t>(res.nprime, d.size());
        sums.push_back(sum_pair_products(d, 0, 0));
    }
    res.nprime = std::max<std::uint64_t>(res.nprime, 1);
    res.n = res.nprime * res.nprime;
    for (auto& s : sums) res.values.push_back(Rational((unsigned long)res.nprime) * s);
    return res;
}

WitnessResult witness_psi1(const ExpFunSpec& spec, const LocalField& F, const Point& x,
                           int depth, const Limits& lim) {
    PolarDecomposition d = polar_decompose(spec, F, x, depth, lim);
    std::uint64_t nprime = std::max<std::uint64_t>(d.size(), 1);

    WitnessResult res;
    res.n = nprime * nprime;
    res.tilde = Rational((unsigned long)nprime) * sum_pair_products(d, 0, 0);

    auto family = enumerate_characters(F, depth, lim);
    bool have = false;
    for (std::uint64_t i = 0; i < family.size(); ++i) {
        Cyclotomic v = reconstruct(d, family[i]);
        Cyclotomic sq = v.abs_sq();
        if (!have || (sq - res.value_sq).sign_real() > 0) {
            res.index = i;
            res.value = v;
            res.value_sq = sq;
            have = true;
        }
    }
    // (1/N) tilde <= |H_psi1|^2, checked exactly
    Cyclotomic lhs = Rational(1, (unsigned long)res.n) * res.tilde;
    res.verdict = (res.value_sq - lhs).sign_real() >= 0;
    return res;
}

GramResult gram_tilde(const std::vector<const ExpFunSpec*>& specs, const LocalField& F,
                      const std::vector<Point>& sample, int depth, const Limits& lim) {
    GramResult res;
    std::vector<PolarDecomposition> ds;
    for (const Point& x : sample) {
        ds.push_back(polar_decompose_joint(specs, F, x, depth, lim));
        res.nprime = std::max<std::uint64_t>(res.nprime, ds.back().size());
    }
    res.nprime = std::max<std::uint64_t>(res.nprime, 1);
    res.n = res.nprime * res.nprime;
    const std::size_t l = specs.size();
    for (const auto& d : ds) {
        std::vector<std::vector<Cyclotomic>> m(l, std::vector<Cyclotomic>(l));
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t s = 0; s < l; ++s)
                m[i][s] = Rational((unsigned long)res.nprime) * sum_pair_products(d, i, s);
        res.values.push_back(std::move(m));
    }
    return res;
}

} // namespace motx
