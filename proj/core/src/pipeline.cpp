#include "sparseode/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <unordered_map>

namespace sparseode {

void EstimatorConfig::validate() const {
    const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    for (double h : bandwidths)
        if (!(h > 0.0) || !std::isfinite(h)) fail("bandwidths must be positive");
    if (bandwidth_folds < 2) fail("bandwidth_folds must be at least 2");
    for (double l : lambdas)
        if (!(l >= 0.0) || !std::isfinite(l)) fail("lambdas must be nonnegative");
    if (lambda_count < 1) fail("lambda_count must be at least 1");
    if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0))
        fail("lambda_min_ratio must lie in (0, 1]");
    if (lambda_folds < 2) fail("lambda_folds must be at least 2");
    if (quadrature_points < 3 || quadrature_points % 2 == 0)
        fail("quadrature_points must be odd and at least 3");
    if (!(scad_a > 2.0)) fail("scad_a must exceed 2");
    if (!(tol > 0.0)) fail("tol must be positive");
    if (max_iter < 1) fail("max_iter must be at least 1");
    if (order < 1) fail("order must be at least 1");
}

SmootherConfig EstimatorConfig::smoother(double bandwidth) const {
    SmootherConfig sc;
    sc.bandwidth = bandwidth;
    sc.order = order;
    sc.kernel = kernel;
    return sc;
}

SmoothedPanel smooth_panel(const TimeSeries& ts, const EstimatorConfig& cfg) {
    cfg.validate();
    ts.validate();
    SmoothedPanel panel;
    panel.quad = QuadratureGrid(cfg.quadrature_points);
    const int p = ts.p();
    const std::vector<double> grid =
        cfg.bandwidths.empty() ? default_bandwidth_grid(ts.n()) : cfg.bandwidths;
    SmootherConfig base = cfg.smoother(grid.front());
    panel.curves.reserve(p);
    panel.bandwidths.reserve(p);
    for (int j = 0; j < p; ++j) {
        const Eigen::VectorXd col = ts.values.col(j);
        double h = grid.front();
        if (grid.size() > 1)
            h = cv_bandwidth(ts.times, col, grid, cfg.bandwidth_folds, base);
        panel.bandwidths.push_back(h);
        panel.curves.push_back(
            smooth_curve(ts.times, col, panel.quad.points, cfg.smoother(h)));
    }
    return panel;
}

FoldModelBuilder make_fold_model_builder(const TimeSeries& ts,
                                         const std::vector<double>& bandwidths,
                                         const QuadratureGrid& quad, int target,
                                         const EstimatorConfig& cfg) {
    if (static_cast<int>(bandwidths.size()) != ts.p())
        throw LengthMismatch("one bandwidth per column expected");
    // Copies live in the closure; the builder may outlive its arguments.
    auto times = std::make_shared<Eigen::VectorXd>(ts.times);
    auto values = std::make_shared<Eigen::MatrixXd>(ts.values);
    auto hs = std::make_shared<std::vector<double>>(bandwidths);
    auto grid = std::make_shared<QuadratureGrid>(quad);
    return [times, values, hs, grid, target, cfg](const std::vector<int>& train) {
        const int m = static_cast<int>(train.size());
        const int p = static_cast<int>(values->cols());
        auto tr_t = std::make_shared<Eigen::VectorXd>(m);
        auto tr_y = std::make_shared<Eigen::MatrixXd>(m, p);
        for (int r = 0; r < m; ++r) {
            tr_t->coeffRef(r) = (*times)[train[r]];
            tr_y->row(r) = values->row(train[r]);
        }
        std::vector<SmoothedCurve> curves;
        curves.reserve(p);
        for (int j = 0; j < p; ++j)
            curves.push_back(smooth_curve(*tr_t, tr_y->col(j), grid->points,
                                          cfg.smoother((*hs)[j])));
        FoldModel model;
        model.fm = assemble_functional_matrix(curves, target, *grid);
        model.value_row = [tr_t, tr_y, hs, cfg, p](double t) {
            Eigen::VectorXd row(p);
            for (int j = 0; j < p; ++j) {
                const Eigen::VectorXd alpha = local_poly_fit(
                    *tr_t, tr_y->col(j), t, cfg.smoother((*hs)[j]));
                row[j] = alpha[0];
            }
            return row;
        };
        return model;
    };
}

RowFit fit_row(const TimeSeries& ts, const SmoothedPanel& panel, int target,
               const EstimatorConfig& cfg) {
    cfg.validate();
    const FunctionalMatrix fm =
        assemble_functional_matrix(panel.curves, target, panel.quad);
    const std::vector<double> candidates =
        cfg.lambdas.empty()
            ? default_lambda_grid(fm.Q, fm.b, cfg.scad_a, cfg.lambda_count,
                                  cfg.lambda_min_ratio)
            : cfg.lambdas;

    FitOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    ScadParams base;
    base.a = cfg.scad_a;

    double lambda = candidates.front();
    if (candidates.size() > 1) {
        const FoldModelBuilder builder =
            make_fold_model_builder(ts, panel.bandwidths, panel.quad, target, cfg);
        lambda = cv_lambda(builder, ts, target, candidates, cfg.lambda_folds, base,
                           opts);
    }
    // The final fit comes from the same warm-started path the folds scored,
    // taken at the selected penalty level.
    const std::vector<SparseFit> path = fit_scad_path(fm, candidates, base, opts);
    size_t at = 0;
    while (at + 1 < candidates.size() && candidates[at] != lambda) ++at;

    RowFit out;
    out.beta = path[at].beta;
    out.support = path[at].support;
    out.lambda = lambda;
    return out;
}

AdjacencyOutput fit_network(const TimeSeries& ts, const EstimatorConfig& cfg) {
    const SmoothedPanel panel = smooth_panel(ts, cfg);
    const int p = ts.p();
    AdjacencyOutput out;
    out.A = Eigen::MatrixXd::Zero(p, p);
    out.supports.reserve(p);
    out.lambdas.reserve(p);
    out.bandwidths = panel.bandwidths;
    out.names = ts.names;
    for (int r = 0; r < p; ++r) {
        RowFit row = fit_row(ts, panel, r, cfg);
        out.A.row(r) = row.beta.transpose();
        out.supports.push_back(std::move(row.support));
        out.lambdas.push_back(row.lambda);
    }
    return out;
}

NetworkComparison compare_network(
    const AdjacencyOutput& adj,
    const std::vector<std::pair<std::string, std::string>>& reference_edges) {
    const int p = static_cast<int>(adj.A.rows());
    if (static_cast<int>(adj.names.size()) != p)
        throw ShapeMismatch("adjacency has no column names to match against");
    std::unordered_map<std::string, int> index;
    for (int j = 0; j < p; ++j) index.emplace(adj.names[j], j);
    const auto lookup = [&](const std::string& name) {
        const auto it = index.find(name);
        if (it == index.end()) throw UnknownGeneName("unknown gene '" + name + "'");
        return it->second;
    };

    NetworkComparison out;
    std::vector<int> src_cols;  // distinct sources, first-appearance order
    for (const auto& [src, tgt] : reference_edges) {
        const int sc = lookup(src);
        lookup(tgt);
        if (std::find(src_cols.begin(), src_cols.end(), sc) == src_cols.end()) {
            src_cols.push_back(sc);
            out.sources.push_back(src);
        }
    }

    const int S = static_cast<int>(src_cols.size());
    // ref(g, s): edge source s -> target g, i.e. coefficient A[g][s] nonzero.
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(p, S);
    Eigen::MatrixXd est(p, S);
    for (const auto& [src, tgt] : reference_edges) {
        const int sc = lookup(src);
        const int s = static_cast<int>(
            std::find(src_cols.begin(), src_cols.end(), sc) - src_cols.begin());
        ref(lookup(tgt), s) = 1.0;
    }
    for (int s = 0; s < S; ++s)
        for (int g = 0; g < p; ++g)
            est(g, s) = adj.A(g, src_cols[s]) != 0.0 ? 1.0 : 0.0;
    out.stats = selection_stats(est, ref);

    // Grid: rows are targets, columns the reference sources.
    //   '#' recovered edge, 'x' spurious, 'o' missed, '.' agreed absent.
    size_t name_w = 6;
    for (const std::string& n : adj.names) name_w = std::max(name_w, n.size());
    std::ostringstream os;
    os << std::string(name_w, ' ');
    for (const std::string& s : out.sources) os << ' ' << s;
    os << '\n';
    for (int g = 0; g < p; ++g) {
        os << adj.names[g] << std::string(name_w - adj.names[g].size(), ' ');
        for (int s = 0; s < S; ++s) {
            const bool e = est(g, s) != 0.0;
            const bool r = ref(g, s) != 0.0;
            const char mark = e && r ? '#' : (e ? 'x' : (r ? 'o' : '.'));
            os << ' ' << std::string(out.sources[s].size() / 2, ' ') << mark
               << std::string(out.sources[s].size() - out.sources[s].size() / 2 - 1,
                              ' ');
        }
        os << '\n';
    }
    os << "legend: # recovered, x spurious, o missed, . agreed absent\n";
    out.table = os.str();
    return out;
}

}  // namespace sparseode
