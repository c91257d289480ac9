// motx command line: evaluate spec files, run polar reductions, sweep
// transfer statements across primes, and poke the finite Fourier layer.
//
// Exit codes: 0 success, 1 statement violation, 2 usage / input error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "motx/character.hpp"
#include "motx/errors.hpp"
#include "motx/eval.hpp"
#include "motx/fourier.hpp"
#include "motx/ir.hpp"
#include "motx/lindep.hpp"
#include "motx/localfield.hpp"
#include "motx/parser.hpp"
#include "motx/reduction.hpp"
#include "motx/report.hpp"
#include "motx/transfer.hpp"

namespace {

using namespace motx;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    return out;
}

// "eq,5" / "mixed,7,2,12": kind, p, and optional f (default 1), precision
// (default 8)
const LocalField& parse_field(const std::string& text) {
    auto parts = split(text, ',');
    if (parts.size() < 2 || parts.size() > 4)
        throw ParseError("--field wants kind,p[,f[,precision]], got '" + text + "'");
    FieldKind kind;
    std::string k = trim(parts[0]);
    if (k == "eq" || k == "equal") kind = FieldKind::EqualChar;
    else if (k == "mixed" || k == "mix") kind = FieldKind::MixedChar;
    else throw ParseError("unknown field kind '" + k + "' (use eq or mixed)");
    std::uint32_t p = static_cast<std::uint32_t>(std::stoul(trim(parts[1])));
    std::uint32_t f = parts.size() > 2 ? static_cast<std::uint32_t>(std::stoul(trim(parts[2]))) : 1;
    int prec = parts.size() > 3 ? std::stoi(trim(parts[3])) : 8;
    return LocalField::get(kind, p, f, prec);
}

// "x = 1*t^-1 + 2; r = a + 1; z = -3", typed against the spec's sorts
Point parse_point(const std::string& text, const std::vector<VarDecl>& vars,
                  const LocalField& F) {
    Point pt;
    for (const auto& entry : split(text, ';')) {
        std::string e = trim(entry);
        if (e.empty()) continue;
        std::size_t eq = e.find('=');
        if (eq == std::string::npos)
            throw ParseError("point entry '" + e + "' has no '='");
        std::string name = trim(e.substr(0, eq));
        std::string val = trim(e.substr(eq + 1));
        const VarDecl* decl = nullptr;
        for (const auto& v : vars)
            if (v.name == name) { decl = &v; break; }
        if (!decl) throw ParseError("point binds '" + name + "' which the spec does not declare");
        switch (decl->sort) {
        case Sort::VF: pt.set(name, parse_element(F, val)); break;
        case Sort::RF: pt.set(name, parse_residue(F.residue(), val)); break;
        case Sort::ZZ: pt.set(name, static_cast<long long>(std::stoll(val))); break;
        }
    }
    return pt;
}

ExpFunSpec load_spec(const std::string& path) {
    ExpFunSpec spec = parse_spec_file(path);
    auto diags = validate(spec);
    if (!diags.empty()) std::cerr << render(diags);
    if (has_errors(diags)) throw ParseError(path + ": spec has errors");
    return spec;
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

std::string complex_str(const std::complex<double>& z) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g %c %.12gi", z.real(),
                  z.imag() < 0 ? '-' : '+', std::abs(z.imag()));
    return buf;
}

// options shared by the sweep-style commands
struct SweepFlags {
    SweepConfig cfg;
    std::vector<std::string> c_texts;      // one tuple per occurrence, "1,2/3,-1"
    std::string y_text;                    // comma list of variable names
    std::vector<std::string> profiles;
    std::string out, stem = "report", format = "json";
    bool stamp = false;
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& s) {
    cmd->add_option("--pmin", s.cfg.p_min, "first prime of the sweep");
    cmd->add_option("--pmax", s.cfg.p_max, "last prime of the sweep");
    cmd->add_option("--f", s.cfg.f, "residue degree");
    cmd->add_option("--precision", s.cfg.precision, "uniformizer digits carried");
    cmd->add_option("--depth", s.cfg.depth, "character family depth (auto-raised)");
    cmd->add_option("--samples", s.cfg.samples, "grid points per prime");
    cmd->add_option("--vmin", s.cfg.vf_vmin, "smallest sampled valuation");
    cmd->add_option("--vmax", s.cfg.vf_vmax, "largest sampled valuation");
    cmd->add_option("--digits", s.cfg.vf_digits, "digits drawn per sample");
    cmd->add_option("--zlo", s.cfg.zz_lo, "integer sample window low end");
    cmd->add_option("--zhi", s.cfg.zz_hi, "integer sample window high end");
    cmd->add_option("--seed", s.cfg.seed, "seed fixing every random draw");
    cmd->add_option("--c", s.c_texts, "coefficient tuple, comma-separated rationals")
        ->take_all();
    cmd->add_option("--c-random", s.cfg.c_random, "extra seeded random tuples");
    cmd->add_option("--yvars", s.y_text, "comma list of variables fixed per test");
    cmd->add_option("--ysamples", s.cfg.y_samples, "samples per fixed variable set");
    cmd->add_option("--profile", s.profiles, "extra polynomial profiled (factorization)")
        ->take_all();
    cmd->add_option("--out", s.out, "directory for report files (default: stdout)");
    cmd->add_option("--stem", s.stem, "report file stem");
    cmd->add_option("--format", s.format, "json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    cmd->add_flag("--stamp", s.stamp, "record the wall clock in the manifest");
}

void finish_sweep_flags(SweepFlags& s) {
    for (const auto& t : s.c_texts) {
        std::vector<Rational> tuple;
        for (const auto& part : split(t, ','))
            tuple.push_back(parse_rational(trim(part)));
        s.cfg.c_vectors.push_back(std::move(tuple));
    }
    for (const auto& n : split(s.y_text, ','))
        if (!trim(n).empty()) s.cfg.y_vars.push_back(trim(n));
    s.cfg.profile_polys = s.profiles;
}

int emit_report(const SweepFlags& s, const RunManifest& m, const TransferReport& rep) {
    if (s.out.empty()) {
        if (s.format == "csv") std::cout << report_csv(rep);
        else std::cout << report_json(m, s.cfg, rep);
    } else {
        for (const auto& path : write_report(m, s.cfg, rep, s.out, s.stem, s.format))
            std::cout << "wrote " << path << "\n";
    }
    std::cout << (rep.ok ? "ok" : "violations found") << "\n";
    return rep.ok ? 0 : 1;
}

std::string timestamp_now() {
    char buf[32];
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int run_eval(const std::string& spec_path, const std::string& field_text,
             const std::string& point_text, int depth, std::uint64_t psi_index) {
    ExpFunSpec spec = load_spec(spec_path);
    const LocalField& F = parse_field(field_text);
    Point x = parse_point(point_text, spec.vars, F);
    Character psi = character_at(F, depth, psi_index);
    Cyclotomic v = eval_expfun(spec, F, psi, x);
    std::cout << "value = " << v.str() << "\n";
    std::cout << "approx = " << complex_str(v.to_complex()) << "\n";
    if (spec.is_motivic()) {
        Rational r = eval_motfun(spec.as_motfun(), F, x);
        std::cout << "rational = " << to_string(r) << "\n";
    }
    return 0;
}

int run_reduce(const std::string& spec_path, const std::string& field_text,
               const std::string& point_text, int depth) {
    ExpFunSpec spec = load_spec(spec_path);
    const LocalField& F = parse_field(field_text);
    Point x = parse_point(point_text, spec.vars, F);
    int d = depth;
    PolarDecomposition dec;
    try {
        dec = polar_decompose(spec, F, x, d);
    } catch (const DepthError& e) {
        d = e.required_depth;
        std::cout << "depth raised to " << d << "\n";
        dec = polar_decompose(spec, F, x, d);
    }
    std::cout << "entries = " << dec.size() << "\n";
    for (std::size_t k = 0; k < dec.entries.size(); ++k) {
        std::cout << "g[" << k << "] = " << dec.entries[k].g.str()
                  << "; h = " << dec.entries[k].h[0].str() << "\n";
    }
    WitnessResult w = witness_psi1(spec, F, x, d);
    std::cout << "N = " << w.n << "\n";
    std::cout << "witness index = " << w.index << "\n";
    std::cout << "|H_psi1|^2 = " << w.value_sq.str() << "\n";
    std::cout << "tilde = " << w.tilde.str() << "\n";
    std::cout << "verdict = " << (w.verdict ? "ok" : "FAILED") << "\n";
    return w.verdict ? 0 : 1;
}

int run_lindep(const std::vector<std::string>& spec_paths, const std::string& g_path,
               const std::string& field_text, SweepFlags& s, int depth,
               std::uint64_t psi_index) {
    std::vector<ExpFunSpec> specs;
    for (const auto& p : spec_paths) specs.push_back(load_spec(p));
    std::vector<const ExpFunSpec*> hs;
    for (const auto& sp : specs) hs.push_back(&sp);
    const LocalField& F = parse_field(field_text);
    finish_sweep_flags(s);
    std::vector<Point> grid = sample_grid(specs[0].vars, F, s.cfg);
    Character psi = character_at(F, depth, psi_index);

    CycloMatrix rows;
    for (const auto& pt : grid) {
        std::vector<Cyclotomic> row;
        for (const auto* h : hs) row.push_back(eval_expfun(*h, F, psi, pt));
        rows.push_back(std::move(row));
    }
    DependenceResult res = dependence_test(rows);
    if (res.verdict == DepVerdict::Dependent) {
        std::cout << "verdict = dependent\n";
        for (std::size_t i = 0; i < res.kernel.size(); ++i)
            std::cout << "kernel[" << i << "] = " << res.kernel[i].str() << "\n";
    } else {
        std::cout << "verdict = independent\n";
        std::cout << "witness rows =";
        for (auto j : res.witness) std::cout << " " << j;
        std::cout << "\n";
    }
    if (!g_path.empty()) {
        ExpFunSpec g = load_spec(g_path);
        auto w = find_witness_w(hs, F, psi, grid);
        if (!w) {
            std::cout << "coefficients: sample gives no invertible tuple\n";
            return 1;
        }
        CramerResult cr = cramer_coeffs(hs, g, F, psi, *w);
        for (std::size_t i = 0; i < cr.c.size(); ++i)
            std::cout << "c[" << i << "] = " << cr.c[i].str() << "\n";
    }
    return 0;
}

int run_fourier_demo(const std::string& factors_text, std::uint64_t seed) {
    std::vector<std::uint64_t> factors;
    for (const auto& part : split(factors_text, ','))
        factors.push_back(std::stoull(trim(part)));
    AbelianGroup G(factors);
    std::mt19937_64 rng(seed);
    GroupFunction f;
    for (std::uint64_t r = 0; r < G.order(); ++r) {
        long long a = static_cast<long long>(rng() % 7) - 3;
        long long k = static_cast<long long>(rng() % G.order());
        f.values.push_back(Cyclotomic(a) * Cyclotomic::root_of_unity(G.order(), k));
    }
    GroupFunction fhat = fourier_transform(G, f);
    NormSandwich ns = check_norm_sandwich(G, f);
    bool pl = plancherel_check(G, f);
    std::uint64_t peak = find_peak_character(G, f);
    std::cout << "order = " << G.order() << "\n";
    std::cout << "sup|f|^2 = " << ns.sup_f_sq.str() << "\n";
    std::cout << "sup|fhat|^2 = " << ns.sup_fhat_sq.str() << "\n";
    std::cout << "sandwich = " << (ns.lower_ok && ns.upper_ok ? "ok" : "FAILED") << "\n";
    std::cout << "plancherel = " << (pl ? "ok" : "FAILED") << "\n";
    std::cout << "peak character = " << peak
              << ", |fhat|^2 = " << fhat.values[peak].abs_sq().str() << "\n";
    return (ns.lower_ok && ns.upper_ok && pl) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"workbench for exponential sums over truncated local fields"};
    app.require_subcommand(1);
    app.set_config("--config", "", "options file (key=value; [section] per command)");

    std::string field_text = "eq,5,1,8";
    std::string point_text;
    int depth = 0;
    std::uint64_t psi_index = 0;

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a spec file at a point");
    std::string eval_spec;
    eval_cmd->add_option("spec", eval_spec, "spec file")->required();
    eval_cmd->add_option("--field", field_text, "kind,p[,f[,precision]]");
    eval_cmd->add_option("--x", point_text, "semicolon list of name = value");
    eval_cmd->add_option("--depth", depth, "character depth");
    eval_cmd->add_option("--psi", psi_index, "character index inside the family");

    auto* reduce_cmd = app.add_subcommand("reduce", "polar decomposition and witness at a point");
    std::string reduce_spec;
    reduce_cmd->add_option("spec", reduce_spec, "spec file")->required();
    reduce_cmd->add_option("--field", field_text, "kind,p[,f[,precision]]");
    reduce_cmd->add_option("--x", point_text, "semicolon list of name = value");
    reduce_cmd->add_option("--depth", depth, "starting depth (auto-raised)");

    auto* sweep_cmd = app.add_subcommand("sweep", "check a transfer statement across primes");
    std::string statement;
    std::vector<std::string> sweep_specs;
    std::string g_path;
    SweepFlags sf;
    sweep_cmd->add_option("--statement", statement, "bound, lincomb, coeff, dependence, rigidity or factorization")
        ->required()
        ->check(CLI::IsMember({"bound", "lincomb", "coeff", "dependence", "rigidity", "factorization"}));
    sweep_cmd->add_option("specs", sweep_specs, "spec files (the H side)")->required();
    sweep_cmd->add_option("--g", g_path, "comparison spec (bound / lincomb)");
    add_sweep_flags(sweep_cmd, sf);

    auto* lindep_cmd = app.add_subcommand("lindep", "linear dependence over a seeded sample");
    std::vector<std::string> lindep_specs;
    std::string lindep_g;
    SweepFlags lf;
    lindep_cmd->add_option("specs", lindep_specs, "spec files")->required();
    lindep_cmd->add_option("--g", lindep_g, "recover coefficients expressing this spec");
    lindep_cmd->add_option("--field", field_text, "kind,p[,f[,precision]]");
    lindep_cmd->add_option("--depth", depth, "character depth");
    lindep_cmd->add_option("--psi", psi_index, "character index inside the family");
    lindep_cmd->add_option("--samples", lf.cfg.samples, "grid points");
    lindep_cmd->add_option("--seed", lf.cfg.seed, "sample seed");
    lindep_cmd->add_option("--vmin", lf.cfg.vf_vmin, "smallest sampled valuation");
    lindep_cmd->add_option("--vmax", lf.cfg.vf_vmax, "largest sampled valuation");
    lindep_cmd->add_option("--digits", lf.cfg.vf_digits, "digits drawn per sample");
    lindep_cmd->add_option("--zlo", lf.cfg.zz_lo, "integer sample window low end");
    lindep_cmd->add_option("--zhi", lf.cfg.zz_hi, "integer sample window high end");

    auto* fourier_cmd = app.add_subcommand("fourier-demo", "transform a random function on a finite abelian group");
    std::string factors_text = "8";
    std::uint64_t fseed = 1;
    fourier_cmd->add_option("--factors", factors_text, "invariant factors, comma-separated");
    fourier_cmd->add_option("--seed", fseed, "value seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(eval_cmd))
            return run_eval(eval_spec, field_text, point_text, depth, psi_index);
        if (app.got_subcommand(reduce_cmd))
            return run_reduce(reduce_spec, field_text, point_text, depth);
        if (app.got_subcommand(lindep_cmd))
            return run_lindep(lindep_specs, lindep_g, field_text, lf, depth, psi_index);
        if (app.got_subcommand(fourier_cmd))
            return run_fourier_demo(factors_text, fseed);

        // sweep
        finish_sweep_flags(sf);
        std::vector<ExpFunSpec> specs;
        for (const auto& p : sweep_specs) specs.push_back(load_spec(p));
        std::vector<const ExpFunSpec*> hs;
        for (const auto& sp : specs) hs.push_back(&sp);

        RunManifest m;
        m.command = join_args(argc, argv);
        m.inputs = sweep_specs;
        if (!g_path.empty()) m.inputs.push_back(g_path);
        m.seed = sf.cfg.seed;
        if (sf.stamp) m.timestamp = timestamp_now();

        TransferReport rep;
        if (statement == "bound") {
            if (specs.size() != 1 || g_path.empty())
                throw ParseError("bound wants exactly one spec plus --g");
            rep = check_bound_transfer(specs[0], load_spec(g_path), sf.cfg);
        } else if (statement == "lincomb") {
            if (g_path.empty()) throw ParseError("lincomb wants --g");
            rep = check_bound_transfer_lincomb(hs, load_spec(g_path), sf.cfg);
        } else if (statement == "coeff") {
            if (sf.cfg.c_vectors.empty())
                throw ParseError("coeff wants --c with one tuple");
            rep = check_coeff_transfer(hs, sf.cfg.c_vectors[0], sf.cfg);
        } else if (statement == "dependence") {
            rep = check_dependence_transfer(hs, sf.cfg);
        } else if (statement == "rigidity") {
            if (specs.size() != 1) throw ParseError("rigidity wants exactly one spec");
            rep = check_rf_zz_rigidity(specs[0], sf.cfg);
        } else { // factorization
            if (specs.size() != 1) throw ParseError("factorization wants exactly one spec");
            rep = check_factorization(specs[0], sf.cfg);
        }
        return emit_report(sf, m, rep);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
