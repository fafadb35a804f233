#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "skelpre/experiment.hpp"
#include "skelpre/oracle.hpp"

using namespace skelpre;

namespace {

ExperimentConfig
load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void
write_output(const std::string& text, const std::string& path)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << text;
}

int
cmd_run(const std::string& config, const std::string& format, const std::string& out_path, bool manufactured)
{
    ExperimentConfig cfg = load_config(config);
    if (!format.empty())
        cfg.format = format == "markdown" ? TableFormat::markdown : TableFormat::csv;
    const std::string out = out_path.empty() ? cfg.output : out_path;

    if (manufactured) {
        if (cfg.domain.tag != DomainTag::square)
            throw Error("--manufactured needs domain=square");
        const auto pts = convergence_study(sine_case(), cfg.method_spec(), cfg.levels);
        std::ostringstream os;
        os << "level,h,l2_error,iterations\n";
        for (const auto& p : pts) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%d,%.6g,%.6e,%d\n", p.level, p.h, p.l2_error, p.iterations);
            os << buf;
        }
        if (pts.size() >= 2)
            os << "# observed rate " << observed_rate(pts) << "\n";
        write_output(os.str(), out);
        return 0;
    }

    const auto rows = run_experiment(cfg);
    write_output(emit_table(rows, cfg.format), out);
    int failed = 0;
    for (const auto& r : rows)
        if (!r.ok) {
            std::cerr << "level " << r.level << ": " << r.error << "\n";
            ++failed;
        }
    return failed ? 2 : 0;
}

int
cmd_condition(const std::string& config)
{
    const ExperimentConfig cfg = load_config(config);
    const MethodSpec spec = cfg.method_spec();
    const int top = *std::max_element(cfg.levels.begin(), cfg.levels.end());
    const MeshHierarchy full = build_hierarchy(cfg.domain, top);
    std::printf("level,dof,cond_d,cond_bd\n");
    int failed = 0;
    for (int level : cfg.levels) {
        try {
            const MeshHierarchy hier = full.truncated(level);
            const SkeletonSpace s(hier.levels.back(), cfg.k);
            auto d = std::make_shared<const SparseMatrix>(assemble_schur(s, spec).d);
            const double kd = dense_eig_extents(*d).cond();
            const double kbd = dense_preconditioned_extents(build_preconditioner(cfg, hier, s, d), *d).cond();
            std::printf("%d,%lld,%.6g,%.6g\n", level, static_cast<long long>(s.dof_count()), kd, kbd);
        } catch (const Error& e) {
            std::fprintf(stderr, "level %d: %s\n", level, e.what());
            ++failed;
        }
    }
    return failed ? 2 : 0;
}

int
cmd_verify()
{
    int failed = 0;
    auto report = [&](const std::string& name, double value, double tol) {
        const bool ok = value <= tol;
        failed += !ok;
        std::printf("%-32s %.2e  %s\n", name.c_str(), value, ok ? "ok" : "FAIL");
    };

    const MeshHierarchy hier = build_hierarchy(DomainKind::square(), 2);
    for (int k : {0, 1})
        for (MethodFamily f : {MethodFamily::hdg1, MethodFamily::hdg2, MethodFamily::hdg3, MethodFamily::hdg4}) {
            if (f == MethodFamily::hdg2 && k == 0)
                continue;
            const SkeletonSpace s(hier.levels[1], k);
            const MethodSpec spec = MethodSpec::make(f, k);
            const DenseMatrix d = assemble_schur(s, spec).d.to_dense();
            const DenseMatrix o = monolithic_hdg(s, spec).schur;
            report("monolithic " + to_string(f) + " k=" + std::to_string(k), (d - o).norm() / o.norm(), 1e-10);
        }

    const SkeletonSpace s(hier.levels[2], 0);
    const DenseMatrix ref = assemble_schur(s, MethodSpec::make(MethodFamily::hdg1, 0)).d.to_dense();
    for (MethodFamily f : {MethodFamily::hdg4, MethodFamily::wg1, MethodFamily::cr}) {
        const DenseMatrix d = assemble_schur(s, MethodSpec::make(f, 0)).d.to_dense();
        report("hdg1 vs " + to_string(f), (d - ref).cwiseAbs().maxCoeff(), 1e-10);
    }
    const CrAssembly cr = cr_shape_assembly(s.mesh(), {});
    report("cr shape functions", (cr.matrix.to_dense() - ref).cwiseAbs().maxCoeff(), 1e-10);
    return failed ? 1 : 0;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"skelpre: multilevel preconditioners for skeleton systems"};
    app.require_subcommand(1);

    std::string config, format, out;
    bool manufactured = false;
    auto* run = app.add_subcommand("run", "Run PCG over the configured levels and print a table");
    run->add_option("--config", config, "Experiment config file")->required();
    run->add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "markdown"}));
    run->add_option("--out", out, "Output path (stdout when omitted)");
    run->add_flag("--manufactured", manufactured, "Convergence study against the sine solution");

    auto* cond = app.add_subcommand("condition", "Dense condition numbers of D and BD per level");
    cond->add_option("--config", config, "Experiment config file")->required();

    auto* verify = app.add_subcommand("verify", "Cross-check assembly against the independent oracles");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run)
            return cmd_run(config, format, out, manufactured);
        if (*cond)
            return cmd_condition(config);
        if (*verify)
            return cmd_verify();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
