#include "skelpre/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <map>
#include <random>
#include <sstream>

#include "skelpre/oracle.hpp"

namespace skelpre {

namespace {

std::string
format_double(double v, std::chars_format fmt, int precision)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, fmt, precision);
    return std::string(buf, res.ptr);
}

std::string
shortest_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int
parse_int(const std::string& s, int line, const std::string& key)
{
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(line, "invalid integer '" + s + "' for " + key);
    return v;
}

double
parse_double(const std::string& s, int line, const std::string& key)
{
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(line, "invalid number '" + s + "' for " + key);
    return v;
}

std::vector<int>
parse_levels(const std::string& s, int line)
{
    std::vector<int> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const int a = parse_int(s.substr(0, dots), line, "levels");
        const int b = parse_int(s.substr(dots + 2), line, "levels");
        if (b < a)
            throw ConfigError(line, "empty level range '" + s + "'");
        for (int j = a; j <= b; ++j)
            out.push_back(j);
    } else {
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(parse_int(item, line, "levels"));
    }
    for (int j : out)
        if (j < 0)
            throw ConfigError(line, "negative level in '" + s + "'");
    return out;
}

std::string
levels_to_string(const std::vector<int>& levels)
{
    bool contiguous = levels.size() > 1;
    for (std::size_t i = 1; i < levels.size(); ++i)
        contiguous = contiguous && levels[i] == levels[i - 1] + 1;
    if (contiguous)
        return std::to_string(levels.front()) + ".." + std::to_string(levels.back());
    std::string s;
    for (std::size_t i = 0; i < levels.size(); ++i)
        s += (i ? "," : "") + std::to_string(levels[i]);
    return s;
}

template <typename Fn>
auto
wrap(int line, Fn&& fn)
{
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(line, e.what());
    }
}

} // namespace

ExperimentConfig
parse_config(const std::string& text)
{
    ExperimentConfig cfg;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        std::istringstream tokens(raw);
        std::string tok;
        while (tokens >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError(line, "expected key=value, got '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const std::string value = tok.substr(eq + 1);
            if (value.empty())
                throw ConfigError(line, "missing value for " + key);
            if (seen.count(key))
                throw ConfigError(line, "duplicate key " + key);
            seen[key] = line;
            if (key == "domain")
                cfg.domain.tag = wrap(line, [&] { return domain_tag_from_string(value); });
            else if (key == "method")
                cfg.method = wrap(line, [&] { return method_family_from_string(value); });
            else if (key == "k")
                cfg.k = parse_int(value, line, key);
            else if (key == "prolongation")
                cfg.prolongation = wrap(line, [&] { return prolongation_from_string(value); });
            else if (key == "levels")
                cfg.levels = parse_levels(value, line);
            else if (key == "preconditioner") {
                if (value == "bpx")
                    cfg.preconditioner = PreconditionerKind::bpx;
                else if (value == "aux")
                    cfg.preconditioner = PreconditionerKind::aux;
                else
                    throw ConfigError(line, "unknown preconditioner '" + value + "'");
            } else if (key == "smoother")
                cfg.smoother = wrap(line, [&] { return smoother_from_string(value); });
            else if (key == "coarse")
                cfg.coarse = wrap(line, [&] { return coarse_from_string(value); });
            else if (key == "reduction") {
                cfg.reduction = parse_double(value, line, key);
                if (!(cfg.reduction > 0.0 && cfg.reduction < 1.0))
                    throw ConfigError(line, "reduction must lie in (0, 1)");
            } else if (key == "initial") {
                if (value == "ones")
                    cfg.initial = InitialGuess::ones;
                else if (value == "random")
                    cfg.initial = InitialGuess::random;
                else
                    throw ConfigError(line, "unknown initial guess '" + value + "'");
            } else if (key == "rhs") {
                if (value == "zero")
                    cfg.rhs = RhsRule::zero;
                else if (value == "manufactured")
                    cfg.rhs = RhsRule::manufactured;
                else
                    throw ConfigError(line, "unknown rhs rule '" + value + "'");
            } else if (key == "output")
                cfg.output = value;
            else if (key == "format") {
                if (value == "csv")
                    cfg.format = TableFormat::csv;
                else if (value == "markdown")
                    cfg.format = TableFormat::markdown;
                else
                    throw ConfigError(line, "unknown format '" + value + "'");
            } else
                throw ConfigError(line, "unknown key '" + key + "'");
        }
    }

    auto line_of = [&](const char* key) { return seen.count(key) ? seen[key] : 0; };
    if (cfg.levels.empty())
        throw ConfigError(0, "levels is required");
    const int method_line = std::max(line_of("method"), line_of("k"));
    wrap(method_line, [&] { return cfg.method_spec(); });
    if (cfg.preconditioner == PreconditionerKind::aux) {
        if (!cfg.smoother || !cfg.coarse)
            throw ConfigError(line_of("preconditioner"), "aux preconditioner requires smoother and coarse");
        if (*cfg.smoother == SmootherKind::richardson && cfg.domain.tag == DomainTag::graded)
            throw ConfigError(line_of("smoother"), "richardson smoother needs a quasi-uniform (square or crack) mesh");
    } else if (cfg.smoother || cfg.coarse)
        throw ConfigError(std::max(line_of("smoother"), line_of("coarse")),
                          "bpx preconditioner takes no smoother or coarse solver");
    return cfg;
}

std::string
serialize(const ExperimentConfig& cfg)
{
    std::ostringstream os;
    os << "domain=" << to_string(cfg.domain.tag) << "\n";
    os << "method=" << to_string(cfg.method) << "\n";
    os << "k=" << cfg.k << "\n";
    os << "prolongation=" << to_string(cfg.prolongation) << "\n";
    os << "levels=" << levels_to_string(cfg.levels) << "\n";
    os << "preconditioner=" << (cfg.preconditioner == PreconditionerKind::bpx ? "bpx" : "aux") << "\n";
    if (cfg.smoother)
        os << "smoother=" << to_string(*cfg.smoother) << "\n";
    if (cfg.coarse)
        os << "coarse=" << to_string(*cfg.coarse) << "\n";
    os << "reduction=" << shortest_double(cfg.reduction) << "\n";
    os << "initial=" << (cfg.initial == InitialGuess::ones ? "ones" : "random") << "\n";
    os << "rhs=" << (cfg.rhs == RhsRule::zero ? "zero" : "manufactured") << "\n";
    if (!cfg.output.empty())
        os << "output=" << cfg.output << "\n";
    os << "format=" << (cfg.format == TableFormat::csv ? "csv" : "markdown") << "\n";
    return os.str();
}

Vector
initial_vector(InitialGuess rule, Index n, unsigned seed)
{
    if (rule == InitialGuess::ones)
        return Vector::Ones(n);
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v[i] = dist(gen);
    return v;
}

LinearOperator
build_preconditioner(const ExperimentConfig& cfg, const MeshHierarchy& hier, const SkeletonSpace& s,
                     std::shared_ptr<const SparseMatrix> d)
{
    if (cfg.preconditioner == PreconditionerKind::bpx)
        return make_bpx(hier, s, cfg.prolongation).as_operator();
    const MethodSpec spec = cfg.method_spec();
    SparseMatrix pi = build_pi(s, cfg.prolongation);
    std::vector<SparseMatrix> prolong;
    SparseMatrix a;
    if (*cfg.coarse == CoarseKind::exact)
        a = p1_stiffness(s.mesh(), spec.diffusion);
    else
        for (int j = 0; j < hier.finest_level(); ++j)
            prolong.push_back(p1_prolongation(*hier.levels[j], *hier.levels[j + 1], hier.parents[j]));
    std::optional<SparseMatrix> gram;
    if (*cfg.smoother == SmootherKind::richardson)
        gram = nodal_gram(s);
    return AuxPreconditioner(std::move(d), *cfg.smoother, std::move(pi), *cfg.coarse, a, std::move(prolong),
                             std::move(gram))
        .as_operator();
}

std::vector<ExperimentRow>
run_experiment(const ExperimentConfig& cfg)
{
    const MethodSpec spec = cfg.method_spec();
    const int top = *std::max_element(cfg.levels.begin(), cfg.levels.end());
    const MeshHierarchy full = build_hierarchy(cfg.domain, top);
    const SourceFn f = cfg.rhs == RhsRule::manufactured ? sine_case().f : SourceFn{};
    std::vector<ExperimentRow> rows;
    for (int level : cfg.levels) {
        ExperimentRow row;
        row.level = level;
        const auto start = std::chrono::steady_clock::now();
        try {
            const MeshHierarchy hier = full.truncated(level);
            const SkeletonSpace s(hier.levels.back(), cfg.k);
            row.dof = s.dof_count();
            SchurSystem sys = assemble_schur(s, spec, f);
            auto d = std::make_shared<const SparseMatrix>(std::move(sys.d));
            const LinearOperator prec = build_preconditioner(cfg, hier, s, d);
            PcgOptions opt;
            opt.reduction = cfg.reduction;
            const PcgResult r =
                pcg(LinearOperator::from_matrix(d), prec, sys.b, initial_vector(cfg.initial, s.dof_count()), opt);
            row.iterations = r.report.iterations;
            row.ritz_cond = r.report.ritz_cond;
        } catch (const NoConvergenceError& e) {
            row.ok = false;
            row.iterations = e.report().iterations;
            row.error = e.what();
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(row);
    }
    return rows;
}

std::string
emit_table(const std::vector<ExperimentRow>& rows, TableFormat format)
{
    std::ostringstream os;
    if (format == TableFormat::csv) {
        os << "level,dof,iterations,ritz_cond,seconds\n";
        for (const auto& r : rows) {
            os << r.level << "," << r.dof << ",";
            if (r.ok)
                os << r.iterations << "," << format_double(r.ritz_cond, std::chars_format::general, 8);
            else
                os << "failed,";
            os << "," << format_double(r.seconds, std::chars_format::fixed, 3) << "\n";
        }
        return os.str();
    }
    os << "| |";
    for (const auto& r : rows)
        os << " T_" << r.level << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < rows.size(); ++i)
        os << "---|";
    os << "\n| dof |";
    for (const auto& r : rows)
        os << " " << r.dof << " |";
    os << "\n| iterations |";
    for (const auto& r : rows)
        os << " " << (r.ok ? std::to_string(r.iterations) : std::string("failed")) << " |";
    os << "\n| ritz cond |";
    for (const auto& r : rows)
        os << " " << (r.ok ? format_double(r.ritz_cond, std::chars_format::general, 4) : std::string("-")) << " |";
    os << "\n| seconds |";
    for (const auto& r : rows)
        os << " " << format_double(r.seconds, std::chars_format::fixed, 2) << " |";
    os << "\n";
    return os.str();
}

std::vector<ExperimentRow>
parse_csv_table(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<ExperimentRow> rows;
    if (!std::getline(in, line) || line != "level,dof,iterations,ritz_cond,seconds")
        throw Error("parse_csv_table: unexpected header");
    int n = 1;
    while (std::getline(in, line)) {
        ++n;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ','))
            cells.push_back(c);
        if (line.back() == ',')
            cells.emplace_back();
        if (cells.size() != 5)
            throw Error("parse_csv_table: line " + std::to_string(n) + " has " + std::to_string(cells.size()) +
                        " fields");
        ExperimentRow r;
        r.level = parse_int(cells[0], n, "level");
        r.dof = parse_int(cells[1], n, "dof");
        if (cells[2] == "failed")
            r.ok = false;
        else {
            r.iterations = parse_int(cells[2], n, "iterations");
            r.ritz_cond = parse_double(cells[3], n, "ritz_cond");
        }
        r.seconds = parse_double(cells[4], n, "seconds");
        rows.push_back(r);
    }
    return rows;
}

} // namespace skelpre
