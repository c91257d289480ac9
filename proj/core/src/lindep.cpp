#include "motx/lindep.hpp"

#include "motx/errors.hpp"

namespace motx {

namespace {

Cyclotomic det_rec(const CycloMatrix& m, std::vector<std::size_t>& cols, std::size_t row) {
    if (cols.size() == 1) return m[row][cols[0]];
    Cyclotomic acc(0);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (m[row][cols[k]].is_zero()) continue;
        std::size_t c = cols[k];
        cols.erase(cols.begin() + (long)k);
        Cyclotomic minor = det_rec(m, cols, row + 1);
        cols.insert(cols.begin() + (long)k, c);
        Cyclotomic term = m[row][c] * minor;
        acc += (k % 2 == 0) ? term : -term;
    }
    return acc;
}

// incremental echelon basis for greedy row extension
struct Echelon {
    std::vector<std::vector<Cyclotomic>> basis; // rows, each with leading col
    std::vector<std::size_t> lead;

    // reduces r against the basis; returns true (and absorbs r) when a
    // nonzero residual remains
    bool add(std::vector<Cyclotomic> r) {
        for (std::size_t b = 0; b < basis.size(); ++b) {
            if (r[lead[b]].is_zero()) continue;
            Cyclotomic factor = r[lead[b]] * basis[b][lead[b]].inverse();
            for (std::size_t j = 0; j < r.size(); ++j) r[j] -= factor * basis[b][j];
        }
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (!r[j].is_zero()) {
                basis.push_back(std::move(r));
                lead.push_back(j);
                return true;
            }
        }
        return false;
    }
};

} // namespace

Cyclotomic det(const CycloMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return Cyclotomic(1);
    for (const auto& r : m)
        if (r.size() != n) throw EvalError("determinant of a non-square matrix");
    std::vector<std::size_t> cols(n);
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    return det_rec(m, cols, 0);
}

DependenceResult dependence_test(const CycloMatrix& rows) {
    if (rows.empty()) throw EvalError("empty sample");
    const std::size_t l = rows[0].size();
    if (l == 0) throw EvalError("no functions to test");
    for (const auto& r : rows)
        if (r.size() != l) throw EvalError("ragged sample matrix");
    if (rows.size() < l)
        throw EvalError("sample smaller than the number of functions (" +
                        std::to_string(rows.size()) + " < " + std::to_string(l) + ")");

    DependenceResult res;
    Echelon ech;
    for (std::size_t j = 0; j < rows.size() && ech.basis.size() < l; ++j)
        if (ech.add(rows[j])) res.witness.push_back(j);

    if (ech.basis.size() == l) {
        res.verdict = DepVerdict::Independent;
        return res;
    }
    res.witness.clear();

    // rank < l: extract a kernel vector from the reduced echelon form
    // (pivot columns = ech.lead, first free column gives the vector)
    std::vector<bool> is_pivot(l, false);
    for (std::size_t c : ech.lead) is_pivot[c] = true;
    std::size_t free_col = l;
    for (std::size_t j = 0; j < l; ++j)
        if (!is_pivot[j]) { free_col = j; break; }
    if (free_col == l) throw Error("internal: full pivot set at deficient rank");

    // back-substitution: c[free] = 1, pivots solve basis * c = 0
    std::vector<Cyclotomic> c(l, Cyclotomic(0));
    c[free_col] = Cyclotomic(1);
    for (std::size_t b = ech.basis.size(); b-- > 0;) {
        Cyclotomic acc(0);
        for (std::size_t j = 0; j < l; ++j)
            if (j != ech.lead[b] && !c[j].is_zero()) acc += ech.basis[b][j] * c[j];
        c[ech.lead[b]] = -acc * ech.basis[b][ech.lead[b]].inverse();
    }
    res.verdict = DepVerdict::Dependent;
    res.kernel = std::move(c);
    return res;
}

CramerResult cramer_coeffs(const std::vector<const ExpFunSpec*>& hs, const ExpFunSpec& g,
                           const LocalField& F, const Character& psi,
                           const std::vector<Point>& w, const Limits& lim) {
    const std::size_t l = hs.size();
    if (l == 0) throw EvalError("no functions given");
    if (w.size() != l)
        throw EvalError("tuple size " + std::to_string(w.size()) +
                        " does not match the " + std::to_string(l) + " functions");

    CycloMatrix m(l, std::vector<Cyclotomic>(l));
    std::vector<Cyclotomic> gv(l);
    for (std::size_t j = 0; j < l; ++j) {
        for (std::size_t i = 0; i < l; ++i) m[j][i] = eval_expfun(*hs[i], F, psi, w[j], lim);
        gv[j] = eval_expfun(g, F, psi, w[j], lim);
    }

    CramerResult res;
    res.d = det(m);
    if (res.d.is_zero())
        throw EvalError("singular sample determinant; pick another tuple");
    for (std::size_t i = 0; i < l; ++i) {
        CycloMatrix mi = m;
        for (std::size_t j = 0; j < l; ++j) mi[j][i] = gv[j];
        res.cap.push_back(det(mi));
        res.c.push_back(res.cap.back() * res.d.inverse());
    }
    return res;
}

std::optional<std::vector<Point>> find_witness_w(const std::vector<const ExpFunSpec*>& hs,
                                                 const LocalField& F, const Character& psi,
                                                 const std::vector<Point>& candidates,
                                                 const Limits& lim) {
    const std::size_t l = hs.size();
    if (l == 0) throw EvalError("no functions given");
    if (candidates.empty()) throw EvalError("empty candidate list");

    Echelon ech;
    std::vector<Point> picked;
    for (const Point& x : candidates) {
        std::vector<Cyclotomic> row(l);
        for (std::size_t i = 0; i < l; ++i) row[i] = eval_expfun(*hs[i], F, psi, x, lim);
        if (ech.add(std::move(row))) {
            picked.push_back(x);
            if (picked.size() == l) return picked;
        }
    }
    return std::nullopt;
}

} // namespace motx
