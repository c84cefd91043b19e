#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cosprec/analysis.hpp"
#include "cosprec/errors.hpp"
#include "cosprec/gallery.hpp"
#include "cosprec/kernels.hpp"
#include "cosprec/krylov.hpp"
#include "cosprec/precond.hpp"

namespace {

constexpr int kExitBadParams = 2;
constexpr int kExitIo = 3;
constexpr int kExitStagnation = 4;
constexpr int kExitSpectrum = 5;
constexpr int kExitBreakdown = 6;
constexpr int kDenseSizeGuard = 5000;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw cosprec::IoError("cannot open " + path + " for writing");
    const std::size_t put = std::fwrite(text.data(), 1, text.size(), f);
    const int rc = std::fclose(f);
    if (put != text.size() || rc != 0) throw cosprec::IoError("short write to " + path);
}

std::string history_csv(const std::vector<cosprec::IterationRecord>& hist) {
    std::string s = "iter,F,phi,alpha,sign,elapsed_ms\n";
    for (const auto& r : hist) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", r.elapsed * 1000.0);
        s += std::to_string(r.k) + "," + fmt17(r.F) + "," + fmt17(r.Phi) + "," +
             fmt17(r.alpha) + "," + (r.sign >= 0.0 ? "1" : "-1") + "," + buf + "\n";
    }
    return s;
}

struct CommonBuildFlags {
    std::string matrix;
    std::string method = "mincos";
    double eps = 0.01;
    int maxit = 1000;
    std::string mode = "dense";
    double thr = 0.0;
    int lfil = 0;
    bool force = false;
};

cosprec::PrecondOptions to_options(const CommonBuildFlags& f) {
    cosprec::PrecondOptions opts;
    opts.method = cosprec::parse_method(f.method);
    opts.epsilon = f.eps;
    opts.max_iter = f.maxit;
    if (f.mode == "dense")
        opts.mode = cosprec::StorageMode::dense;
    else if (f.mode == "sparse")
        opts.mode = cosprec::StorageMode::sparse;
    else
        throw cosprec::InvalidParam("mode must be dense or sparse");
    opts.thr = f.thr;
    opts.lfil = f.lfil;
    return opts;
}

cosprec::SymMatrix load_matrix(const std::string& path, const std::string& mode, bool force) {
    cosprec::SymMatrix A = cosprec::mm_read(path);
    if (mode == "dense" && A.n() > kDenseSizeGuard && !force)
        throw cosprec::InvalidParam("dense mode refuses n > 5000 (pass --force to override)");
    if (mode == "dense") return A.to_dense();
    return A.to_sparse();
}

int run(int argc, char** argv) {
    CLI::App app{"approximate inverse preconditioners via angle minimization"};
    app.require_subcommand(1);
    int threads = 1;
    if (const char* env = std::getenv("COSPREC_THREADS")) threads = std::atoi(env);
    app.add_option("--threads", threads, "worker threads for the matrix kernels");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a gallery matrix");
    std::string gen_kind, gen_out;
    int gen_param = 1;
    std::uint64_t gen_seed = 0;
    gen->add_option("--kind", gen_kind, "poisson2d|poisson3d|lehmer|minij|moler|wathen")
        ->required();
    gen->add_option("--param", gen_param, "size parameter N")->required();
    gen->add_option("--seed", gen_seed, "stream seed (wathen only)");
    gen->add_option("--out", gen_out, "output Matrix Market path")->required();

    // build
    auto* build = app.add_subcommand("build", "build a preconditioner");
    CommonBuildFlags bf;
    std::string build_out, build_hist;
    build->add_option("--matrix", bf.matrix, "input Matrix Market file")->required();
    build->add_option("--method", bf.method, "cauchycos|mincos|cauchyfro|minres");
    build->add_option("--eps", bf.eps, "stopping tolerance on min(F, phi)");
    build->add_option("--maxit", bf.maxit, "iteration cap");
    build->add_option("--mode", bf.mode, "dense|sparse");
    build->add_option("--thr", bf.thr, "drop tolerance (sparse mode)");
    build->add_option("--lfil", bf.lfil, "max off-diagonal entries kept per column");
    build->add_option("--out", build_out, "output path for X (Matrix Market)");
    build->add_option("--history", build_hist, "output path for the iteration history CSV");
    build->add_flag("--force", bf.force, "allow dense mode past n = 5000");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "spectral report for a preconditioner");
    std::string an_matrix, an_precond, an_report;
    analyze->add_option("--matrix", an_matrix, "input Matrix Market file")->required();
    analyze->add_option("--precond", an_precond, "preconditioner Matrix Market file")->required();
    analyze->add_option("--report", an_report, "output JSON path (stdout when omitted)");

    // solve
    auto* solve = app.add_subcommand("solve", "run CG or PCG with a random right hand side");
    std::string so_matrix, so_precond, so_hist;
    std::uint64_t so_seed = 1;
    double so_tol = 1e-8;
    int so_maxit = 10000;
    solve->add_option("--matrix", so_matrix, "input Matrix Market file")->required();
    solve->add_option("--precond", so_precond, "preconditioner Matrix Market file (plain CG when omitted)");
    solve->add_option("--rhs-seed", so_seed, "seed for the uniform(-1,1) right hand side");
    solve->add_option("--tol", so_tol, "relative residual target");
    solve->add_option("--maxit", so_maxit, "iteration cap");
    solve->add_option("--history", so_hist, "output path for the residual history CSV");

    // compare
    auto* compare = app.add_subcommand("compare", "run several methods on one matrix");
    CommonBuildFlags cf;
    std::string cmp_methods = "cauchycos,cauchyfro,minres,mincos", cmp_out;
    compare->add_option("--matrix", cf.matrix, "input Matrix Market file")->required();
    compare->add_option("--methods", cmp_methods, "comma-separated method list");
    compare->add_option("--eps", cf.eps, "stopping tolerance on min(F, phi)");
    compare->add_option("--maxit", cf.maxit, "iteration cap");
    compare->add_option("--mode", cf.mode, "dense|sparse");
    compare->add_option("--thr", cf.thr, "drop tolerance (sparse mode)");
    compare->add_option("--lfil", cf.lfil, "max off-diagonal entries kept per column");
    compare->add_option("--out", cmp_out, "output CSV path")->required();
    compare->add_flag("--force", cf.force, "allow dense mode past n = 5000");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadParams;
    }
    cosprec::set_threads(threads);

    if (gen->parsed()) {
        cosprec::MatrixKind kind;
        kind.tag = cosprec::parse_tag(gen_kind);
        kind.param = gen_param;
        kind.seed = gen_seed;
        const cosprec::SymMatrix A = cosprec::generate(kind);
        cosprec::mm_write(A, gen_out);
        std::printf("n=%d nnz=%lld\n", A.n(), static_cast<long long>(A.count_nonzeros()));
        return 0;
    }

    if (build->parsed()) {
        const cosprec::PrecondOptions opts = to_options(bf);
        const cosprec::SymMatrix A = load_matrix(bf.matrix, bf.mode, bf.force);
        const cosprec::PrecondResult res = cosprec::build_preconditioner(A, opts);
        if (!build_out.empty()) cosprec::mm_write(res.X, build_out);
        if (!build_hist.empty()) write_file(build_hist, history_csv(res.history));
        const cosprec::IterationRecord& last = res.history.back();
        std::printf("termination=%s iterations=%d F=%.17g phi=%.17g\n",
                    cosprec::termination_name(res.termination).c_str(), res.iterations, last.F,
                    last.Phi);
        if (res.termination == cosprec::Termination::stagnated && res.iterations == 0)
            return kExitStagnation;
        return 0;
    }

    if (analyze->parsed()) {
        const cosprec::SymMatrix A = cosprec::mm_read(an_matrix);
        const cosprec::SymMatrix X = cosprec::mm_read(an_precond);
        const cosprec::SpectrumReport rep = cosprec::analyze_preconditioner(X, A);
        std::string json = "{\n";
        json += "  \"lambda_min\": " + fmt17(rep.lambda_min) + ",\n";
        json += "  \"lambda_max\": " + fmt17(rep.lambda_max) + ",\n";
        json += "  \"cond_ratio\": " +
                (rep.cond_ratio ? fmt17(*rep.cond_ratio) : std::string("null")) + ",\n";
        json += "  \"fill_percent\": " + fmt17(rep.fill_percent) + ",\n";
        json += std::string("  \"spd\": ") + (rep.spd ? "true" : "false") + "\n}\n";
        if (!an_report.empty())
            write_file(an_report, json);
        else
            std::fputs(json.c_str(), stdout);
        return 0;
    }

    if (solve->parsed()) {
        const cosprec::SymMatrix A = cosprec::mm_read(so_matrix);
        const std::vector<double> b = cosprec::random_rhs(A.n(), so_seed);
        cosprec::SolveResult res;
        if (so_precond.empty()) {
            res = cosprec::cg(A, b, so_tol, so_maxit);
        } else {
            const cosprec::SymMatrix X = cosprec::mm_read(so_precond);
            res = cosprec::pcg(A, X, b, so_tol, so_maxit);
        }
        if (!so_hist.empty()) {
            std::string s = "iter,res_norm\n";
            for (std::size_t k = 0; k < res.report.residual_history.size(); ++k)
                s += std::to_string(k) + "," + fmt17(res.report.residual_history[k]) + "\n";
            write_file(so_hist, s);
        }
        std::printf("iterations=%d converged=%s\n", res.report.iterations,
                    res.report.converged ? "true" : "false");
        return 0;
    }

    // compare
    std::vector<std::string> names;
    std::string cur;
    for (char c : cmp_methods + ",") {
        if (c == ',') {
            if (!cur.empty()) names.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::vector<cosprec::Method> methods;
    for (const std::string& nm : names) methods.push_back(cosprec::parse_method(nm));
    if (methods.empty()) throw cosprec::InvalidParam("empty method list");

    const cosprec::SymMatrix A = load_matrix(cf.matrix, cf.mode, cf.force);
    std::string csv = "method,iterations,final_F,final_phi,elapsed_ms\n";
    for (const cosprec::Method m : methods) {
        cosprec::PrecondOptions opts = to_options(cf);
        opts.method = m;
        try {
            const cosprec::PrecondResult res = cosprec::build_preconditioner(A, opts);
            const cosprec::IterationRecord& last = res.history.back();
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", last.elapsed * 1000.0);
            csv += cosprec::method_name(m) + "," + std::to_string(res.iterations) + "," +
                   fmt17(last.F) + "," + fmt17(last.Phi) + "," + buf + "\n";
        } catch (const cosprec::Error&) {
            csv += cosprec::method_name(m) + ",-1,nan,nan,0.000\n";
        }
        write_file(cmp_out, csv); // progress survives a later method failing hard
    }
    std::printf("wrote %s\n", cmp_out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cosprec::NotConverged& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSpectrum;
    } catch (const cosprec::Breakdown& e) {
        std::fprintf(stderr, "error: preconditioner not SPD (%s)\n", e.what());
        return kExitBreakdown;
    } catch (const cosprec::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const cosprec::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const cosprec::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadParams;
    }
}
