#include "hyperlap/io.hpp"
#include "hyperlap/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace hyperlap::io {

namespace fs = std::filesystem;

namespace {

Error schema(const std::string& msg)
{
    return Error("io", "SchemaError", msg);
}

void dump(const json& j, std::string& out, int indent)
{
    const std::string pad(indent * 2, ' ');
    const std::string inner((indent + 1) * 2, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) { // std::map keeps keys sorted
            if (!first)
                out += ",\n";
            first = false;
            out += inner + json(it.key()).dump() + ": ";
            dump(it.value(), out, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // flat numeric arrays stay on one line
        bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); });
        out += flat ? "[" : "[\n";
        bool first = true;
        for (const json& e : j) {
            if (!first)
                out += flat ? ", " : ",\n";
            first = false;
            if (!flat)
                out += inner;
            dump(e, out, indent + 1);
        }
        out += flat ? "]" : "\n" + pad + "]";
        return;
    }
    case json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

Path rows_to_path(const json& j, const std::string& what, const Hypergraph& g, const TimeGrid& grid,
                  bool allow_controlled_only)
{
    if (!j.is_array() || j.empty())
        throw schema(what + " must be a non-empty array of rows");
    const int N = g.N(), m = g.m();
    auto row = [&](const json& r) {
        Eigen::VectorXd v = vector_from_json(r, what);
        if (v.size() == N)
            return v;
        if (allow_controlled_only && v.size() == m) {
            Eigen::VectorXd full = Eigen::VectorXd::Zero(N);
            full.tail(m) = v;
            return full;
        }
        throw schema(what + " rows must have " + std::to_string(N) +
                     (allow_controlled_only ? " or " + std::to_string(m) : std::string()) + " entries");
    };
    // a bare vector is shorthand for a single row
    if (j[0].is_number())
        return constant_path(row(j), grid);
    if (j.size() == 1)
        return constant_path(row(j[0]), grid);
    if (static_cast<int>(j.size()) != grid.K + 1)
        throw Error("dynamics", "GridMismatch",
                    what + " has " + std::to_string(j.size()) + " rows, grid needs " + std::to_string(grid.K + 1));
    Path p;
    for (const json& r : j)
        p.push_back(row(r));
    return p;
}

double number(const json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_number())
        throw schema(std::string("missing numeric field \"") + key + "\"");
    return j[key].get<double>();
}

} // namespace

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("io", "FileNotFound", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("io", "WriteFailed", "cannot write " + tmp.string());
        out << content;
        if (!out)
            throw Error("io", "WriteFailed", "short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

json parse_json(const std::string& text, const std::string& origin)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("io", "ParseError", origin + ": " + e.what());
    }
}

json load_json(const std::string& path)
{
    return parse_json(read_file(path), path);
}

std::string format_double(double v)
{
    if (!std::isfinite(v))
        return "null";
    if (v == 0.0)
        return "0"; // no signed zeros in output
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_json(const json& j)
{
    std::string out;
    dump(j, out, 0);
    out += "\n";
    return out;
}

Hypergraph hypergraph_from_json(const json& j)
{
    if (!j.is_object())
        throw schema("hypergraph must be a JSON object");
    if (!j.contains("n") || !j["n"].is_number_integer() || !j.contains("m") || !j["m"].is_number_integer())
        throw schema("hypergraph needs integer fields \"n\" and \"m\"");
    if (!j.contains("edges") || !j["edges"].is_array())
        throw schema("hypergraph needs an \"edges\" array");
    std::vector<Edge> edges;
    for (const json& e : j["edges"]) {
        if (!e.is_object() || !e.contains("v") || !e["v"].is_array())
            throw schema("each edge needs a vertex array \"v\"");
        if (!e.contains("w") || !e["w"].is_number())
            throw schema("each edge needs a numeric weight \"w\"");
        Edge edge;
        for (const json& v : e["v"]) {
            if (!v.is_number_integer())
                throw schema("vertex indices must be integers");
            edge.v.push_back(v.get<int>() - 1);
        }
        edge.w = e["w"].get<double>();
        edges.push_back(std::move(edge));
    }
    return Hypergraph::validate(j["n"].get<int>(), j["m"].get<int>(), std::move(edges));
}

json hypergraph_to_json(const Hypergraph& g)
{
    json edges = json::array();
    for (const Edge& e : g.edges()) {
        json v = json::array();
        for (int i : e.v)
            v.push_back(i + 1);
        edges.push_back({{"v", v}, {"w", e.w}});
    }
    return {{"n", g.n()}, {"m", g.m()}, {"edges", edges}};
}

Hypergraph load_hypergraph(const std::string& path)
{
    return hypergraph_from_json(load_json(path));
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what)
{
    if (!j.is_array())
        throw schema(what + " must be an array of numbers");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw schema(what + " must be an array of numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

json vector_to_json(const Eigen::VectorXd& v)
{
    json a = json::array();
    for (int i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

json path_to_json(const Path& p)
{
    json a = json::array();
    for (const Eigen::VectorXd& v : p)
        a.push_back(vector_to_json(v));
    return a;
}

std::string path_csv(const TimeGrid& grid, const Path& p, const std::string& prefix)
{
    std::string out = "t";
    const int N = p.empty() ? 0 : static_cast<int>(p[0].size());
    for (int i = 1; i <= N; ++i)
        out += "," + prefix + std::to_string(i);
    out += "\n";
    for (std::size_t k = 0; k < p.size(); ++k) {
        out += format_double(grid.t(static_cast<int>(k)));
        for (int i = 0; i < N; ++i)
            out += "," + format_double(p[k][i]);
        out += "\n";
    }
    return out;
}

Trajectory parse_trajectory_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t", 0) != 0)
        throw Error("io", "ParseError", "trajectory CSV must start with a header beginning with t");
    const long cols = std::count(line.begin(), line.end(), ',');
    std::vector<double> times;
    Path x;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(cell, &used));
                if (used != cell.size())
                    throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error("io", "ParseError", "bad number in trajectory CSV: " + cell);
            }
        }
        if (static_cast<long>(vals.size()) != cols + 1)
            throw Error("io", "ParseError", "ragged row in trajectory CSV");
        times.push_back(vals[0]);
        x.push_back(Eigen::Map<Eigen::VectorXd>(vals.data() + 1, cols));
    }
    if (x.size() < 2)
        throw Error("io", "ParseError", "trajectory CSV needs at least two rows");
    Trajectory tr;
    tr.grid = {times.back(), static_cast<int>(x.size()) - 1};
    tr.x = std::move(x);
    return tr;
}

double parse_exponent(const json& j, const std::string& what)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "INF"))
        return kInf;
    throw schema(what + " must be a number or \"inf\"");
}

ProblemFile load_problem(const std::string& path, const Overrides& ov)
{
    json j = load_json(path);
    if (!j.is_object())
        throw schema("problem file must hold a JSON object");
    ProblemFile pf;
    if (!j.contains("hypergraph"))
        throw schema("problem needs a \"hypergraph\" field (file path or inline object)");
    if (j["hypergraph"].is_string()) {
        fs::path gp(j["hypergraph"].get<std::string>());
        if (gp.is_relative())
            gp = fs::path(path).parent_path() / gp;
        pf.G = load_hypergraph(gp.string());
    } else {
        pf.G = hypergraph_from_json(j["hypergraph"]);
    }

    pf.params.p = ov.p ? *ov.p : number(j, "p");
    pf.params.q = ov.q ? *ov.q : (j.contains("q") ? parse_exponent(j["q"], "q") : pf.params.p);
    pf.lambda = ov.lambda ? *ov.lambda : (j.contains("lambda") ? number(j, "lambda") : 0.1);
    pf.grid.T = ov.T ? *ov.T : number(j, "T");
    if (ov.steps)
        pf.grid.K = *ov.steps;
    else if (j.contains("steps") && j["steps"].is_number_integer())
        pf.grid.K = j["steps"].get<int>();
    else
        throw schema("missing integer field \"steps\"");
    if (!(pf.grid.T > 0.0) || pf.grid.K < 1)
        throw Error("dynamics", "InvalidGrid", "time grid needs T > 0 and steps >= 1");

    const int N = pf.G.N(), n = pf.G.n();
    const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(N);
    pf.a = j.contains("a") ? rows_to_path(j["a"], "a", pf.G, pf.grid, true) : constant_path(zeros, pf.grid);
    for (Eigen::VectorXd& v : pf.a)
        v.head(n).setZero();
    pf.h = j.contains("h") ? rows_to_path(j["h"], "h", pf.G, pf.grid, false) : constant_path(zeros, pf.grid);

    if (!j.contains("x0"))
        throw schema("missing field \"x0\"");
    Eigen::VectorXd x0 = vector_from_json(j["x0"], "x0");
    if (x0.size() == n) {
        pf.x0 = pf.a[0];
        pf.x0.head(n) = x0;
    } else if (x0.size() == N) {
        pf.x0 = x0;
    } else {
        throw schema("x0 must have n or N entries");
    }

    if (j.contains("x_target")) {
        pf.x_target = rows_to_path(j["x_target"], "x_target", pf.G, pf.grid, false);
        pf.has_target = true;
    } else {
        pf.x_target = constant_path(zeros, pf.grid);
    }
    // convenience default: the dummy final target is the path target at T
    pf.z_target = j.contains("z_target") ? vector_from_json(j["z_target"], "z_target") : pf.x_target.back();
    if (pf.z_target.size() != N)
        throw schema("z_target must have N entries");
    pf.M = ov.M ? *ov.M : (j.contains("M") ? number(j, "M") : 1e12);

    if (j.contains("opt")) {
        const json& o = j["opt"];
        if (o.contains("max_iters"))
            pf.opt.max_iters = o["max_iters"].get<int>();
        if (o.contains("tol"))
            pf.opt.tol = o["tol"].get<double>();
        if (o.contains("step0"))
            pf.opt.step0 = o["step0"].get<double>();
        if (o.contains("backtrack"))
            pf.opt.backtrack = o["backtrack"].get<double>();
    }
    if (ov.tol)
        pf.opt.tol = *ov.tol;
    if (ov.max_iters)
        pf.opt.max_iters = *ov.max_iters;
    return pf;
}

ControlProblem to_control_problem(const ProblemFile& pf)
{
    ControlProblem pb;
    pb.G = pf.G;
    pb.params = pf.params;
    pb.lambda = pf.lambda;
    pb.grid = pf.grid;
    pb.h = pf.h;
    pb.x0_free = pf.x0.head(pf.G.n());
    pb.x_target = pf.x_target;
    pb.z_target = pf.z_target;
    pb.M = pf.M;
    return pb;
}

} // namespace hyperlap::io
