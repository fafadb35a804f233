#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skelpre/mesh.hpp"
#include "skelpre/methods.hpp"
#include "skelpre/precond.hpp"

namespace skelpre {

enum class PreconditionerKind
{
    bpx,
    aux
};

enum class InitialGuess
{
    ones,
    random
};

enum class RhsRule
{
    zero,
    manufactured
};

enum class TableFormat
{
    csv,
    markdown
};

/// One run of the skeleton solver over a range of hierarchy levels.
struct ExperimentConfig
{
    DomainKind domain = DomainKind::square();
    MethodFamily method = MethodFamily::hdg3;
    int k = 0;
    ProlongationKind prolongation = ProlongationKind::face_l2;
    std::vector<int> levels;
    PreconditionerKind preconditioner = PreconditionerKind::bpx;
    std::optional<SmootherKind> smoother;
    std::optional<CoarseKind> coarse;
    double reduction = 1e-6;
    InitialGuess initial = InitialGuess::ones;
    RhsRule rhs = RhsRule::zero;
    std::string output;
    TableFormat format = TableFormat::csv;

    MethodSpec method_spec() const { return MethodSpec::make(method, k, domain); }
};

// Grammar: key=value pairs separated by whitespace or newlines, '#' starts
// a comment. Keys: domain, method, k, prolongation (p1|p2|face_mean|face_l2),
// levels (a..b or a,b,c), preconditioner (bpx|aux), smoother
// (jacobi|sgs|richardson), coarse (exact|bpx), reduction, initial
// (ones|random), rhs (zero|manufactured), output, format (csv|markdown).
// Throws ConfigError carrying the offending line.
ExperimentConfig parse_config(const std::string& text);
std::string serialize(const ExperimentConfig& cfg);

struct ExperimentRow
{
    int level = 0;
    Index dof = 0;
    int iterations = 0;
    double ritz_cond = 0.0;
    double seconds = 0.0;
    bool ok = true;
    std::string error;
};

// For each level: hierarchy T_0..T_level, assemble D, build the
// preconditioner and run PCG from the configured start. Solver failures
// are recorded in the row and the remaining levels still run.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg);

// Builds the preconditioner of cfg for the skeleton system d on the finest
// level of hier.
LinearOperator build_preconditioner(const ExperimentConfig& cfg, const MeshHierarchy& hier, const SkeletonSpace& s,
                                    std::shared_ptr<const SparseMatrix> d);

std::string emit_table(const std::vector<ExperimentRow>& rows, TableFormat format);

// Parses csv produced by emit_table.
std::vector<ExperimentRow> parse_csv_table(const std::string& text);

// Fixed seed for InitialGuess::random.
Vector initial_vector(InitialGuess rule, Index n, unsigned seed = 20240607u);

} // namespace skelpre
