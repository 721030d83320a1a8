// Copyright 2026 The gossipsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gossip/error.hpp"
#include "gossip/rng.hpp"

namespace gossip {

/// Largest row-sum error validate() accepts.
inline constexpr double kRowSumTolerance = 1e-9;
/// Eigenvalues below this are treated as zero.
inline constexpr double kEigenTolerance = 1e-9;

//---------------------------------------------------------------------------//
/*!
 * Row-stochastic pair-selection matrix with zero diagonal, n >= 3.
 *
 * Entry (i, j) is the probability that node i, once drawn, picks partner j.
 * Only constructible through validate(), so every instance satisfies the
 * invariants.
 */
class SelectionMatrix {
  public:
    std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
    double operator()(std::size_t i, std::size_t j) const
    {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Eigen::MatrixXd& entries() const { return entries_; }

    /// Smallest positive entry (a_*).
    double min_positive() const
    {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < entries_.size(); ++i) {
            double v = entries_.data()[i];
            if (v > 0.0 && v < best)
                best = v;
        }
        return best;
    }

    /// True when a_ij > 0 exactly when a_ji > 0.
    bool has_symmetric_pattern() const
    {
        for (Eigen::Index i = 0; i < entries_.rows(); ++i)
            for (Eigen::Index j = i + 1; j < entries_.cols(); ++j)
                if ((entries_(i, j) > 0.0) != (entries_(j, i) > 0.0))
                    return false;
        return true;
    }

    std::vector<std::vector<double>> rows() const
    {
        std::vector<std::vector<double>> out(size(), std::vector<double>(size()));
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j)
                out[i][j] = (*this)(i, j);
        return out;
    }

    friend bool operator==(const SelectionMatrix& a, const SelectionMatrix& b)
    {
        return a.entries_ == b.entries_;
    }

  private:
    explicit SelectionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {}
    friend SelectionMatrix validate(const std::vector<std::vector<double>>& raw);

    Eigen::MatrixXd entries_;
};

/// Check a raw matrix against the selection-matrix invariants. Never renormalizes.
inline SelectionMatrix validate(const std::vector<std::vector<double>>& raw)
{
    const std::size_t n = raw.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (raw[i].size() != n) {
            throw Error(ErrorCode::NotSquare, "row " + std::to_string(i + 1) + " has "
                                                  + std::to_string(raw[i].size())
                                                  + " entries, expected " + std::to_string(n));
        }
    }
    if (n < 3)
        throw Error(ErrorCode::TooSmall, "need at least 3 nodes, got " + std::to_string(n));

    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = raw[i][j];
            const std::string where = "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
            if (!std::isfinite(v))
                throw Error(ErrorCode::NonFiniteEntry, where + " is not finite");
            if (v < 0.0)
                throw Error(ErrorCode::NegativeEntry, where + " is negative");
            if (i == j && v != 0.0)
                throw Error(ErrorCode::NonzeroDiagonal, where + " is on the diagonal and nonzero");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream os;
            os << "row " << i + 1 << " sums to " << std::setprecision(17) << sum << ", expected 1";
            throw Error(ErrorCode::NotStochastic, os.str());
        }
    }
    return SelectionMatrix(std::move(m));
}

//---------------------------------------------------------------------------//
// Induced graph
//---------------------------------------------------------------------------//

/// Arc (from, to) means node `to` may pick `from`: a_{to,from} > 0. Zero-based.
struct Arc {
    std::size_t from;
    std::size_t to;
    friend bool operator==(const Arc&, const Arc&) = default;
};

struct InducedGraph {
    std::size_t n = 0;
    std::vector<Arc> arcs;
};

inline InducedGraph induced_graph(const SelectionMatrix& a)
{
    InducedGraph g{a.size(), {}};
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a(i, j) > 0.0)
                g.arcs.push_back({j, i});
    return g;
}

/// Connectivity of the graph with arc directions ignored.
inline bool is_weakly_connected(const InducedGraph& g)
{
    if (g.n == 0)
        return true;
    std::vector<std::size_t> parent(g.n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t components = g.n;
    for (const auto& arc : g.arcs) {
        auto ra = find(arc.from);
        auto rb = find(arc.to);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components == 1;
}

inline bool is_weakly_connected(const SelectionMatrix& a)
{
    return is_weakly_connected(induced_graph(a));
}

//---------------------------------------------------------------------------//
// Spectral data of D - (A + A^T)
//---------------------------------------------------------------------------//

struct SpectralData {
    Eigen::VectorXd degree;     ///< d_i = sum_j (a_ij + a_ji)
    Eigen::MatrixXd laplacian;  ///< diag(degree) - (A + A^T)
    Eigen::VectorXd spectrum;   ///< ascending
    double lambda2 = 0.0;       ///< second smallest eigenvalue
    double lambdaN = 0.0;       ///< largest eigenvalue
    double aStar = 0.0;         ///< smallest positive a_ij
};

inline Eigen::MatrixXd laplacian_of(const SelectionMatrix& a)
{
    const Eigen::MatrixXd w = a.entries() + a.entries().transpose();
    Eigen::MatrixXd lap = -w;
    lap.diagonal() = w.rowwise().sum();
    return lap;
}

inline SpectralData spectral(const SelectionMatrix& a)
{
    SpectralData out;
    out.laplacian = laplacian_of(a);
    out.degree = out.laplacian.diagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.laplacian, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::EigenFailure, "symmetric eigensolver did not converge");
    out.spectrum = solver.eigenvalues();  // Eigen returns ascending order
    out.lambda2 = out.spectrum(1);
    out.lambdaN = out.spectrum(out.spectrum.size() - 1);
    out.aStar = a.min_positive();
    return out;
}

//---------------------------------------------------------------------------//
// Topology generators
//---------------------------------------------------------------------------//

enum class TopologyKind { Complete, Ring, ErdosRenyi, WattsStrogatz, BarabasiAlbert };

struct TopologySpec {
    TopologyKind kind = TopologyKind::Complete;
    std::size_t n = 3;
    double p = 0.5;            ///< edge probability (Erdős–Rényi)
    std::size_t k_nn = 4;      ///< lattice degree, even (Watts–Strogatz)
    double p_rewire = 0.1;     ///< rewiring probability (Watts–Strogatz)
    std::size_t m = 2;         ///< edges per new node (Barabási–Albert)
    std::uint64_t seed = 0;
};

inline constexpr int kGeneratorRetries = 100;

namespace detail {

using Adjacency = std::vector<std::vector<char>>;

inline void link(Adjacency& adj, std::size_t i, std::size_t j)
{
    adj[i][j] = 1;
    adj[j][i] = 1;
}

inline Adjacency topology(const TopologySpec& spec, Xoshiro256& rng)
{
    const std::size_t n = spec.n;
    Adjacency adj(n, std::vector<char>(n, 0));
    switch (spec.kind) {
    case TopologyKind::Complete:
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                link(adj, i, j);
        break;
    case TopologyKind::Ring:
        for (std::size_t i = 0; i < n; ++i)
            link(adj, i, (i + 1) % n);
        break;
    case TopologyKind::ErdosRenyi:
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.uniform01() < spec.p)
                    link(adj, i, j);
        break;
    case TopologyKind::WattsStrogatz: {
        const std::size_t half = spec.k_nn / 2;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 1; d <= half; ++d)
                link(adj, i, (i + d) % n);
        // Rewire each lattice edge (i, i+d) with probability p_rewire.
        for (std::size_t d = 1; d <= half; ++d) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = (i + d) % n;
                if (rng.uniform01() >= spec.p_rewire)
                    continue;
                std::vector<std::size_t> free;
                for (std::size_t t = 0; t < n; ++t)
                    if (t != i && !adj[i][t])
                        free.push_back(t);
                if (free.empty())
                    continue;
                const std::size_t t = free[rng.below(free.size())];
                adj[i][j] = adj[j][i] = 0;
                link(adj, i, t);
            }
        }
        break;
    }
    case TopologyKind::BarabasiAlbert: {
        const std::size_t seed_nodes = spec.m + 1;
        for (std::size_t i = 0; i < seed_nodes; ++i)
            for (std::size_t j = i + 1; j < seed_nodes; ++j)
                link(adj, i, j);
        // Endpoint list: each node appears once per incident edge.
        std::vector<std::size_t> ends;
        for (std::size_t i = 0; i < seed_nodes; ++i)
            for (std::size_t j = 0; j < seed_nodes; ++j)
                if (adj[i][j])
                    ends.push_back(i);
        for (std::size_t v = seed_nodes; v < n; ++v) {
            std::vector<std::size_t> targets;
            while (targets.size() < spec.m) {
                const std::size_t t = ends[rng.below(ends.size())];
                if (std::find(targets.begin(), targets.end(), t) == targets.end())
                    targets.push_back(t);
            }
            for (auto t : targets) {
                link(adj, v, t);
                ends.push_back(v);
                ends.push_back(t);
            }
        }
        break;
    }
    }
    return adj;
}

inline void check_topology_spec(const TopologySpec& spec)
{
    if (spec.n < 3)
        throw Error(ErrorCode::TooSmall, "need at least 3 nodes, got " + std::to_string(spec.n));
    auto bad = [](const std::string& what) { throw Error(ErrorCode::BadParameter, what); };
    switch (spec.kind) {
    case TopologyKind::ErdosRenyi:
        if (!(spec.p > 0.0 && spec.p <= 1.0))
            bad("erdos_renyi p must lie in (0, 1]");
        break;
    case TopologyKind::WattsStrogatz:
        if (spec.k_nn < 2 || spec.k_nn % 2 != 0 || spec.k_nn >= spec.n)
            bad("watts_strogatz k_nn must be even, >= 2 and < n");
        if (!(spec.p_rewire >= 0.0 && spec.p_rewire <= 1.0))
            bad("watts_strogatz p_rewire must lie in [0, 1]");
        break;
    case TopologyKind::BarabasiAlbert:
        if (spec.m < 1 || spec.m >= spec.n)
            bad("barabasi_albert m must satisfy 1 <= m < n");
        break;
    default:
        break;
    }
}

}  // namespace detail

/// Undirected topology with uniform row normalization over neighbors.
inline SelectionMatrix generate(const TopologySpec& spec)
{
    detail::check_topology_spec(spec);
    const std::size_t n = spec.n;
    const bool random = spec.kind == TopologyKind::ErdosRenyi
                        || spec.kind == TopologyKind::WattsStrogatz
                        || spec.kind == TopologyKind::BarabasiAlbert;
    const int attempts = random ? kGeneratorRetries : 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        auto rng = make_stream(spec.seed, static_cast<std::uint64_t>(attempt));
        auto adj = detail::topology(spec, rng);
        std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
        bool isolated = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto deg = std::count(adj[i].begin(), adj[i].end(), char{1});
            if (deg == 0) {
                isolated = true;
                break;
            }
            for (std::size_t j = 0; j < n; ++j)
                if (adj[i][j])
                    rows[i][j] = 1.0 / static_cast<double>(deg);
        }
        if (isolated)
            continue;
        auto a = validate(rows);
        if (is_weakly_connected(a))
            return a;
    }
    throw Error(ErrorCode::DisconnectedAfterRetries,
                "no weakly connected instance after " + std::to_string(attempts) + " attempts");
}

inline std::string to_string(TopologyKind kind)
{
    switch (kind) {
    case TopologyKind::Complete: return "complete";
    case TopologyKind::Ring: return "ring";
    case TopologyKind::ErdosRenyi: return "erdos_renyi";
    case TopologyKind::WattsStrogatz: return "watts_strogatz";
    case TopologyKind::BarabasiAlbert: return "barabasi_albert";
    }
    return "unknown";
}

inline TopologyKind topology_kind_from_string(const std::string& name)
{
    for (auto k : {TopologyKind::Complete, TopologyKind::Ring, TopologyKind::ErdosRenyi,
                   TopologyKind::WattsStrogatz, TopologyKind::BarabasiAlbert})
        if (to_string(k) == name)
            return k;
    throw Error(ErrorCode::BadParameter, "unknown topology kind '" + name + "'");
}

//---------------------------------------------------------------------------//
// Import / export
//---------------------------------------------------------------------------//

/// Row-major CSV. Lines starting with '#' are comments; "# n=<int>" is checked if present.
inline std::vector<std::vector<double>> read_matrix_csv(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    long declared_n = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos)
            continue;
        if (line[first] == '#') {
            const auto pos = line.find("n=");
            if (pos != std::string::npos)
                declared_n = std::stol(line.substr(pos + 2));
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw Error(ErrorCode::BadConfig, "cannot parse matrix cell '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (declared_n >= 0 && static_cast<std::size_t>(declared_n) != rows.size())
        throw Error(ErrorCode::BadConfig, "header declares n=" + std::to_string(declared_n) + " but found "
                                              + std::to_string(rows.size()) + " rows");
    return rows;
}

inline void write_matrix_csv(std::ostream& out, const SelectionMatrix& a)
{
    out << "# n=" << a.size() << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j)
            out << (j ? "," : "") << a(i, j);
        out << '\n';
    }
}

inline std::vector<std::vector<double>> matrix_rows_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("rows"))
        throw Error(ErrorCode::BadConfig, "matrix JSON needs a \"rows\" array");
    auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
    if (j.contains("n") && j.at("n").get<std::size_t>() != rows.size())
        throw Error(ErrorCode::BadConfig, "\"n\" does not match the number of rows");
    return rows;
}

inline nlohmann::json matrix_to_json(const SelectionMatrix& a)
{
    return {{"n", a.size()}, {"rows", a.rows()}};
}

}  // namespace gossip
