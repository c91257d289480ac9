// Microbenchmarks for the hot paths: exact cyclotomic products, residue
// field arithmetic, character evaluation, point evaluation, polar grouping
// and the finite Fourier transform.

#include <benchmark/benchmark.h>

#include "motx/character.hpp"
#include "motx/cyclotomic.hpp"
#include "motx/eval.hpp"
#include "motx/fourier.hpp"
#include "motx/localfield.hpp"
#include "motx/parser.hpp"
#include "motx/reduction.hpp"
#include "motx/residue.hpp"

using namespace motx;

namespace {

const char* kPolarMix =
    "class: Cexp\n"
    "vars: x: VF\n"
    "set X: ord(x) <= -1\n"
    "summand:\n"
    "H:\n"
    "beta: 1\n"
    "summand:\n"
    "g: x\n";

Cyclotomic dense_cyclotomic(long shift) {
    Cyclotomic a(0L);
    for (long k = 0; k < 25; ++k)
        a = a + Cyclotomic(k + shift) * Cyclotomic::root_of_unity(25, k);
    return a;
}

void BM_CyclotomicMul(benchmark::State& state) {
    Cyclotomic a = dense_cyclotomic(1);
    Cyclotomic b = dense_cyclotomic(2);
    for (auto _ : state) {
        Cyclotomic c = a * b;
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_CyclotomicMul);

void BM_CyclotomicAbsSq(benchmark::State& state) {
    Cyclotomic a = dense_cyclotomic(1);
    for (auto _ : state) {
        Cyclotomic c = a.abs_sq();
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(BM_CyclotomicAbsSq);

void BM_ResidueArith(benchmark::State& state) {
    const ResidueField& k = ResidueField::get(3, 2);
    std::vector<ResidueElem> elems;
    for (std::uint64_t i = 1; i < k.q(); ++i)
        elems.push_back(ResidueElem::from_index(k, i));
    for (auto _ : state) {
        for (const auto& a : elems)
            for (const auto& b : elems) {
                ResidueElem c = a * b;
                benchmark::DoNotOptimize(c);
            }
    }
}
BENCHMARK(BM_ResidueArith);

void BM_CharacterEval(benchmark::State& state) {
    const LocalField& F = LocalField::get(FieldKind::EqualChar, 5, 1, 8);
    Character psi = character_at(F, 1, 3);
    ValuedElem x = parse_element(F, "2*t^-1 + 1*t^0 + 3*t^1");
    for (auto _ : state) {
        Cyclotomic v = psi(x);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_CharacterEval);

void BM_EvalExpFun(benchmark::State& state) {
    ExpFunSpec spec = parse_spec(kPolarMix, "bench");
    const LocalField& F = LocalField::get(FieldKind::EqualChar, 5, 1, 8);
    Character psi = character_at(F, 1, 3);
    Point x;
    x.set("x", parse_element(F, "1*t^-1"));
    for (auto _ : state) {
        Cyclotomic v = eval_expfun(spec, F, psi, x);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_EvalExpFun);

void BM_PolarDecompose(benchmark::State& state) {
    ExpFunSpec spec = parse_spec(kPolarMix, "bench");
    const LocalField& F = LocalField::get(FieldKind::EqualChar, 5, 1, 8);
    Point x;
    x.set("x", parse_element(F, "1*t^-1"));
    for (auto _ : state) {
        PolarDecomposition d = polar_decompose(spec, F, x, 1);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_PolarDecompose);

void BM_FourierTransform(benchmark::State& state) {
    AbelianGroup G({2, 3, 4});
    GroupFunction f;
    for (std::uint64_t r = 0; r < G.order(); ++r)
        f.values.push_back(Cyclotomic(static_cast<long long>(r % 5) - 2) *
                           Cyclotomic::root_of_unity(G.order(), r));
    for (auto _ : state) {
        GroupFunction fhat = fourier_transform(G, f);
        benchmark::DoNotOptimize(fhat);
    }
}
BENCHMARK(BM_FourierTransform);

} // namespace

BENCHMARK_MAIN();
