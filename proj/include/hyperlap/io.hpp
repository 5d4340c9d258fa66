#pragma once

#include "hyperlap/control.hpp"
#include "hyperlap/dynamics.hpp"
#include "hyperlap/hypergraph.hpp"

#include <json.hpp>
#include <optional>
#include <string>

namespace hyperlap::io {

using json = nlohmann::json;

std::string read_file(const std::string& path);
// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, const std::string& content);

json parse_json(const std::string& text, const std::string& origin);
json load_json(const std::string& path);

// Key-sorted JSON with every float printed to 17 significant digits.
std::string dump_json(const json& j);
std::string format_double(double v);

// Hypergraph files use 1-based vertex indices.
Hypergraph hypergraph_from_json(const json& j);
json hypergraph_to_json(const Hypergraph& g);
Hypergraph load_hypergraph(const std::string& path);

Eigen::VectorXd vector_from_json(const json& j, const std::string& what);
json vector_to_json(const Eigen::VectorXd& v);
json path_to_json(const Path& p);

// header t,<prefix>1,...,<prefix>N and one row per grid node
std::string path_csv(const TimeGrid& grid, const Path& p, const std::string& prefix = "x");
Trajectory parse_trajectory_csv(const std::string& text);

double parse_exponent(const json& j, const std::string& what); // number or "inf"

/**
 * Experiment description shared by simulate, control and sweep. Rows of h, a
 * and x_target may hold N values or, for a, only the m controlled values; a
 * single row is repeated over the grid.
 */
struct ProblemFile
{
    Hypergraph G;
    EnergyParams params;
    double lambda = 0.1;
    TimeGrid grid;
    Eigen::VectorXd x0; // length N, controlled part taken from a(0) when x0 has n entries
    Path h;
    Path a;
    Path x_target;
    Eigen::VectorXd z_target;
    double M = 1e12;
    OptOptions opt;
    bool has_target = false;
};

struct Overrides
{
    std::optional<double> p, q, lambda, T, M, tol;
    std::optional<int> steps, max_iters;
};

ProblemFile load_problem(const std::string& path, const Overrides& ov = {});
ControlProblem to_control_problem(const ProblemFile& pf);

} // namespace hyperlap::io
