#include "msreg/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msreg/dataset.hpp"

namespace msreg {

namespace {

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

void check_inputs(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size()) throw DataError("feature rows and outcome length differ");
    if (!x.allFinite() || !y.allFinite()) throw DataError("non-finite values in regression inputs");
}

// Centered Gram form shared by coordinate descent: gram = Xc'Xc / n, xty = Xc'yc / n.
struct CdProblem {
    Matrix gram;
    Vector xty;
    Vector x_mean;
    double y_mean = 0.0;
};

CdProblem make_problem(const Matrix& x, const Vector& y) {
    CdProblem p;
    const double n = static_cast<double>(x.rows());
    p.x_mean = x.colwise().mean().transpose();
    p.y_mean = y.mean();
    const Matrix xc = x.rowwise() - p.x_mean.transpose();
    const Vector yc = y.array() - p.y_mean;
    p.gram = xc.transpose() * xc / n;
    p.xty = xc.transpose() * yc / n;
    return p;
}

// One sweep of cyclic coordinate descent. Returns the largest coefficient change.
double cd_sweep(const CdProblem& p, double alpha, double lambda, Vector& beta, Vector& gbeta) {
    const double l1 = lambda * (1.0 - alpha);
    const double l2 = 2.0 * lambda * alpha;
    double max_change = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        const double gjj = p.gram(j, j);
        if (gjj <= 0.0) continue;
        const double rho = p.xty[j] - gbeta[j] + gjj * beta[j];
        const double next = soft_threshold(rho, l1) / (gjj + l2);
        const double delta = next - beta[j];
        if (delta != 0.0) {
            gbeta += delta * p.gram.col(j);
            beta[j] = next;
            max_change = std::max(max_change, std::abs(delta));
        }
    }
    return max_change;
}

void cd_solve(const CdProblem& p, double alpha, double lambda, Vector& beta, double tol, int max_sweeps) {
    Vector gbeta = p.gram * beta;
    for (int s = 0; s < max_sweeps; ++s)
        if (cd_sweep(p, alpha, lambda, beta, gbeta) < tol) break;
}

LinearModel finish_model(const CdProblem& p, const Vector& beta) {
    LinearModel m;
    m.coefficients = beta;
    m.intercept = p.y_mean - p.x_mean.dot(beta);
    return m;
}

std::vector<double> lambda_grid(double lambda_max, int count, double min_ratio) {
    std::vector<double> grid(at(count));
    for (int i = 0; i < count; ++i) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        grid[at(i)] = lambda_max * std::pow(min_ratio, frac);
    }
    return grid;
}

std::vector<Index> rows_where(const std::vector<int>& fold, int f, bool equal) {
    std::vector<Index> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
        if ((fold[i] == f) == equal) out.push_back(static_cast<Index>(i));
    return out;
}

}  // namespace

std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed) {
    require(folds >= 1, "fold count must be positive");
    std::vector<Index> perm(at(n));
    for (Index i = 0; i < n; ++i) perm[at(i)] = i;
    Rng rng(mix_seed(seed, 0xF01D));
    shuffle_in_place(perm, rng);
    std::vector<int> fold(at(n));
    for (Index i = 0; i < n; ++i) fold[at(perm[at(i)])] = static_cast<int>(i % folds);
    return fold;
}

Vector LinearModel::predict(const Matrix& x) const {
    if (x.cols() != coefficients.size()) throw DataError("linear model: column count mismatch");
    return (x * coefficients).array() + intercept;
}

nlohmann::json LinearModel::to_json() const {
    nlohmann::json coef = nlohmann::json::object();
    for (Index j = 0; j < coefficients.size(); ++j)
        if (coefficients[j] != 0.0) {
            const std::string key = at(j) < feature_names.size() ? feature_names[at(j)] : std::to_string(j);
            coef[key] = coefficients[j];
        }
    return {{"type", "linear"},
            {"intercept", intercept},
            {"p", coefficients.size()},
            {"feature_names", feature_names},
            {"coefficients", coef}};
}

LinearModel LinearModel::from_json(const nlohmann::json& j) {
    LinearModel m;
    m.intercept = j.at("intercept").get<double>();
    const auto p = j.at("p").get<Index>();
    j.at("feature_names").get_to(m.feature_names);
    m.coefficients = Vector::Zero(p);
    for (const auto& [key, value] : j.at("coefficients").items()) {
        auto it = std::find(m.feature_names.begin(), m.feature_names.end(), key);
        const Index idx = it != m.feature_names.end() ? static_cast<Index>(it - m.feature_names.begin()) : std::stol(key);
        m.coefficients[idx] = value.get<double>();
    }
    return m;
}

double elastic_net_lambda_max(const Matrix& x, const Vector& y, double alpha) {
    const CdProblem p = make_problem(x, y);
    const double c = p.xty.cwiseAbs().maxCoeff();
    // pure ridge has no finite zeroing penalty; use a heavy-shrinkage anchor instead
    return alpha < 1.0 ? c / (1.0 - alpha) : c * 1e3;
}

double elastic_net_objective(const Matrix& x, const Vector& y, double intercept, const Vector& beta, double alpha,
                             double lambda) {
    const double n = static_cast<double>(x.rows());
    const Vector r = (y - x * beta).array() - intercept;
    return r.squaredNorm() / (2.0 * n) + lambda * (alpha * beta.squaredNorm() + (1.0 - alpha) * beta.lpNorm<1>());
}

std::vector<double> elastic_net_sweep_objectives(const Matrix& x, const Vector& y, double alpha, double lambda,
                                                 int max_sweeps) {
    check_inputs(x, y);
    const CdProblem p = make_problem(x, y);
    Vector beta = Vector::Zero(x.cols());
    Vector gbeta = Vector::Zero(x.cols());
    std::vector<double> out;
    auto objective = [&] {
        const LinearModel m = finish_model(p, beta);
        return elastic_net_objective(x, y, m.intercept, beta, alpha, lambda);
    };
    out.push_back(objective());
    for (int s = 0; s < max_sweeps; ++s) {
        const double change = cd_sweep(p, alpha, lambda, beta, gbeta);
        out.push_back(objective());
        if (change < 1e-12) break;
    }
    return out;
}

ElasticNetFit fit_elastic_net(const Matrix& x, const Vector& y, const ElasticNetOptions& o) {
    check_inputs(x, y);
    require(o.alpha >= 0.0 && o.alpha <= 1.0, "elastic net alpha must lie in [0, 1]");
    const Index n = x.rows();
    if (n < 2) throw DataError("elastic net needs at least two rows");

    const CdProblem full = make_problem(x, y);
    ElasticNetFit fit;
    Vector beta = Vector::Zero(x.cols());

    if (o.lambda) {
        require(*o.lambda >= 0.0, "lambda must be non-negative");
        cd_solve(full, o.alpha, *o.lambda, beta, o.tolerance, o.max_sweeps);
        fit.lambda = *o.lambda;
        fit.model = finish_model(full, beta);
        return fit;
    }

    const double lmax = elastic_net_lambda_max(x, y, o.alpha);
    if (lmax <= 0.0) {  // constant outcome or constant features: intercept only
        fit.model = finish_model(full, beta);
        return fit;
    }
    int folds = o.folds;
    if (n < folds) folds = 3;
    if (n < folds) {
        fit.lambda = 0.01 * lmax;
        cd_solve(full, o.alpha, fit.lambda, beta, o.tolerance, o.max_sweeps);
        fit.model = finish_model(full, beta);
        return fit;
    }

    fit.lambda_grid = lambda_grid(lmax, o.n_lambda, o.lambda_min_ratio);
    fit.cv_error.assign(fit.lambda_grid.size(), 0.0);
    fit.folds_used = folds;
    const auto fold = fold_assignment(n, folds, o.seed);
    for (int f = 0; f < folds; ++f) {
        const auto tr = rows_where(fold, f, false);
        const auto te = rows_where(fold, f, true);
        const CdProblem prob = make_problem(take_rows(x, tr), take(y, tr));
        const Matrix xte = take_rows(x, te);
        const Vector yte = take(y, te);
        Vector b = Vector::Zero(x.cols());
        for (std::size_t l = 0; l < fit.lambda_grid.size(); ++l) {
            cd_solve(prob, o.alpha, fit.lambda_grid[l], b, o.tolerance, o.max_sweeps);
            const LinearModel m = finish_model(prob, b);
            fit.cv_error[l] += (m.predict(xte) - yte).squaredNorm();
        }
    }
    for (double& e : fit.cv_error) e /= static_cast<double>(n);
    const auto best = static_cast<std::size_t>(
        std::min_element(fit.cv_error.begin(), fit.cv_error.end()) - fit.cv_error.begin());
    for (std::size_t l = 0; l <= best; ++l) cd_solve(full, o.alpha, fit.lambda_grid[l], beta, o.tolerance, o.max_sweeps);
    fit.lambda = fit.lambda_grid[best];
    fit.model = finish_model(full, beta);
    return fit;
}

// ---------------------------------------------------------------------------
// homotopy
// ---------------------------------------------------------------------------

namespace {

struct PathCore {
    std::vector<PathPoint> points;
    std::vector<Index> excluded;
    bool warning = false;
};

// Active-set homotopy on the centered Gram form: c(beta) = b - G beta.
PathCore homotopy_path(const Matrix& G, const Vector& b, Index n, double collinear_tol) {
    const Index p = b.size();
    PathCore out;
    std::vector<bool> excluded(at(p), false);
    const double diag_max = p > 0 ? G.diagonal().maxCoeff() : 0.0;
    Index eligible = 0;
    for (Index j = 0; j < p; ++j) {
        if (!(G(j, j) > 1e-14 * std::max(diag_max, 1.0))) excluded[at(j)] = true;
        else ++eligible;
    }

    Vector beta = Vector::Zero(p);
    Vector c = b;
    Index j0 = -1;
    for (Index j = 0; j < p; ++j)
        if (!excluded[at(j)] && (j0 < 0 || std::abs(c[j]) > std::abs(c[j0]))) j0 = j;
    if (j0 < 0 || c[j0] == 0.0) {
        out.points.push_back({0.0, beta, {}, PathEvent::End, -1});
        return out;
    }

    const double lambda0 = std::abs(c[j0]);
    const double eps = 1e-12 * lambda0;
    double lambda = lambda0;
    std::vector<Index> active{j0};
    std::vector<double> sign(at(p), 0.0);
    sign[at(j0)] = c[j0] > 0 ? 1.0 : -1.0;
    out.points.push_back({lambda, beta, active, PathEvent::Start, j0});
    const Index max_active = std::min(n - 1, eligible);
    Index last_dropped = -1;

    auto solve_active = [&](const std::vector<Index>& set, const Vector& rhs_lambda_part, double lam) {
        const auto k = static_cast<Index>(set.size());
        Matrix ga(k, k);
        Vector rhs(k);
        for (Index r = 0; r < k; ++r) {
            for (Index s = 0; s < k; ++s) ga(r, s) = G(set[at(r)], set[at(s)]);
            rhs[r] = b[set[at(r)]] - lam * rhs_lambda_part[r];
        }
        return Vector(ga.ldlt().solve(rhs));
    };

    const int max_steps = static_cast<int>(20 * std::max<Index>(p, 1) + 100);
    for (int step = 0; step < max_steps; ++step) {
        const auto k = static_cast<Index>(active.size());
        Matrix ga(k, k);
        Vector sa(k);
        for (Index r = 0; r < k; ++r) {
            sa[r] = sign[at(active[at(r)])];
            for (Index s = 0; s < k; ++s) ga(r, s) = G(active[at(r)], active[at(s)]);
        }
        const Eigen::LDLT<Matrix> ldlt(ga);
        const Vector d = ldlt.solve(sa);
        Vector a = Vector::Zero(p);
        for (Index r = 0; r < k; ++r) a += d[r] * G.col(active[at(r)]);

        double delta = lambda;
        PathEvent event = PathEvent::End;
        Index var = -1;
        double enter_sign = 0.0;
        std::vector<bool> in_active(at(p), false);
        for (Index j : active) in_active[at(j)] = true;

        if (k < max_active) {
            for (Index j = 0; j < p; ++j) {
                if (in_active[at(j)] || excluded[at(j)] || j == last_dropped) continue;
                const double cand[2] = {(1.0 - a[j]) > 0.0 && lambda - c[j] >= 0.0 ? (lambda - c[j]) / (1.0 - a[j]) : -1.0,
                                        (1.0 + a[j]) > 0.0 && lambda + c[j] >= 0.0 ? (lambda + c[j]) / (1.0 + a[j]) : -1.0};
                for (int s = 0; s < 2; ++s)
                    if (cand[s] > eps && cand[s] < delta) {
                        delta = cand[s];
                        event = PathEvent::Enter;
                        var = j;
                        enter_sign = s == 0 ? 1.0 : -1.0;
                    }
            }
        }
        for (Index r = 0; r < k; ++r) {
            const Index j = active[at(r)];
            if (d[r] == 0.0) continue;
            const double cand = -beta[j] / d[r];
            if (cand > eps && cand < delta) {
                delta = cand;
                event = PathEvent::Leave;
                var = j;
            }
        }

        if (event == PathEvent::Enter) {
            // exact collinearity with the active set: exclude and redo the step
            Vector gaj(k);
            for (Index r = 0; r < k; ++r) gaj[r] = G(active[at(r)], var);
            const double resid = G(var, var) - gaj.dot(ldlt.solve(gaj));
            if (resid <= collinear_tol * G(var, var)) {
                excluded[at(var)] = true;
                out.excluded.push_back(var);
                out.warning = true;
                continue;
            }
        }

        double next_lambda = lambda - delta;
        if (event == PathEvent::End || next_lambda <= eps) {
            next_lambda = 0.0;
            event = PathEvent::End;
            var = -1;
        }

        std::vector<Index> solve_set = active;
        if (event == PathEvent::Leave) solve_set.erase(std::find(solve_set.begin(), solve_set.end(), var));
        Vector s_part(static_cast<Index>(solve_set.size()));
        for (std::size_t r = 0; r < solve_set.size(); ++r) s_part[static_cast<Index>(r)] = sign[at(solve_set[r])];
        const Vector sol = solve_active(solve_set, s_part, next_lambda);
        beta.setZero();
        for (std::size_t r = 0; r < solve_set.size(); ++r) beta[solve_set[r]] = sol[static_cast<Index>(r)];

        if (event == PathEvent::Leave) {
            active = solve_set;
            sign[at(var)] = 0.0;
            last_dropped = var;
        } else if (event == PathEvent::Enter) {
            active.push_back(var);
            std::sort(active.begin(), active.end());
            sign[at(var)] = enter_sign;
            last_dropped = -1;
        }
        lambda = next_lambda;
        c = b - G * beta;
        out.points.push_back({lambda, beta, active, event, var});
        if (event == PathEvent::End) break;
        if (event == PathEvent::Enter && static_cast<Index>(active.size()) >= max_active && max_active < eligible) break;
    }
    return out;
}

LassoPath path_for(const Matrix& x, const Vector& y, double collinear_tol) {
    LassoPath path;
    path.x_mean = x.colwise().mean().transpose();
    path.y_mean = y.mean();
    const Matrix xc = x.rowwise() - path.x_mean.transpose();
    const Vector yc = y.array() - path.y_mean;
    PathCore core = homotopy_path(xc.transpose() * xc, xc.transpose() * yc, x.rows(), collinear_tol);
    path.points = std::move(core.points);
    path.excluded = std::move(core.excluded);
    path.collinear_warning = core.warning;
    path.chosen = static_cast<Index>(path.points.size()) - 1;
    return path;
}

const char* event_name(PathEvent e) {
    switch (e) {
    case PathEvent::Start: return "start";
    case PathEvent::Enter: return "enter";
    case PathEvent::Leave: return "leave";
    case PathEvent::End: return "end";
    }
    return "end";
}

PathEvent event_from(const std::string& s) {
    if (s == "start") return PathEvent::Start;
    if (s == "enter") return PathEvent::Enter;
    if (s == "leave") return PathEvent::Leave;
    return PathEvent::End;
}

}  // namespace

Vector LassoPath::coefficients_at(double lambda) const {
    if (points.empty()) return Vector::Zero(x_mean.size());
    if (lambda >= points.front().lambda) return Vector::Zero(points.front().coefficients.size());
    for (std::size_t t = 1; t < points.size(); ++t) {
        const PathPoint& hi = points[t - 1];
        const PathPoint& lo = points[t];
        if (lambda >= lo.lambda) {
            const double w = (hi.lambda - lambda) / (hi.lambda - lo.lambda);
            return (1.0 - w) * hi.coefficients + w * lo.coefficients;
        }
    }
    return points.back().coefficients;
}

double LassoPath::intercept_for(const Vector& coefficients) const { return y_mean - x_mean.dot(coefficients); }

LinearModel LassoPath::model_at(Index point) const {
    require(point >= 0 && point < static_cast<Index>(points.size()), "path point out of range");
    LinearModel m;
    m.coefficients = points[at(point)].coefficients;
    m.intercept = intercept_for(m.coefficients);
    m.feature_names = feature_names;
    return m;
}

LassoPath fit_lasso_homotopy(const Matrix& x, const Vector& y, const LassoOptions& o) {
    check_inputs(x, y);
    const Index n = x.rows();
    if (n < 2) throw DataError("homotopy LASSO needs at least two rows");
    LassoPath path = path_for(x, y, o.collinearity_tolerance);

    int folds = o.folds;
    if (n < folds) folds = 3;
    if (!o.cross_validate || n < 2 * folds || path.points.size() < 2) return path;

    path.cv_error.assign(path.points.size(), 0.0);
    const auto fold = fold_assignment(n, folds, o.seed);
    for (int f = 0; f < folds; ++f) {
        const auto tr = rows_where(fold, f, false);
        const auto te = rows_where(fold, f, true);
        const LassoPath sub = path_for(take_rows(x, tr), take(y, tr), o.collinearity_tolerance);
        const Matrix xte = take_rows(x, te);
        const Vector yte = take(y, te);
        const double scale = static_cast<double>(tr.size()) / static_cast<double>(n);
        for (std::size_t t = 0; t < path.points.size(); ++t) {
            const Vector beta = sub.coefficients_at(path.points[t].lambda * scale);
            const Vector pred = (xte * beta).array() + sub.intercept_for(beta);
            path.cv_error[t] += (pred - yte).squaredNorm();
        }
    }
    for (double& e : path.cv_error) e /= static_cast<double>(n);
    path.chosen = static_cast<Index>(std::min_element(path.cv_error.begin(), path.cv_error.end()) - path.cv_error.begin());
    return path;
}

double lasso_kkt_violation(const LassoPath& path, const Matrix& x, const Vector& y) {
    const Matrix xc = x.rowwise() - path.x_mean.transpose();
    const Vector yc = y.array() - path.y_mean;
    double worst = 0.0;
    for (const PathPoint& pt : path.points) {
        const Vector c = xc.transpose() * (yc - xc * pt.coefficients);
        std::vector<bool> act(at(c.size()), false);
        for (Index j : pt.active) act[at(j)] = true;
        for (Index j = 0; j < c.size(); ++j) {
            if (std::find(path.excluded.begin(), path.excluded.end(), j) != path.excluded.end()) continue;
            const double v = act[at(j)] ? std::abs(std::abs(c[j]) - pt.lambda) : std::max(0.0, std::abs(c[j]) - pt.lambda);
            worst = std::max(worst, v);
        }
    }
    return worst;
}

nlohmann::json LassoPath::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const PathPoint& pt : points) {
        std::vector<double> coef(pt.coefficients.data(), pt.coefficients.data() + pt.coefficients.size());
        pts.push_back({{"lambda", pt.lambda},
                       {"coefficients", coef},
                       {"active", pt.active},
                       {"event", event_name(pt.event)},
                       {"variable", pt.variable}});
    }
    std::vector<double> xm(x_mean.data(), x_mean.data() + x_mean.size());
    return {{"type", "lasso_path"}, {"points", pts},         {"chosen", chosen},
            {"cv_error", cv_error}, {"x_mean", xm},          {"y_mean", y_mean},
            {"feature_names", feature_names}, {"excluded", excluded}, {"collinear_warning", collinear_warning}};
}

LassoPath LassoPath::from_json(const nlohmann::json& j) {
    LassoPath path;
    for (const auto& pj : j.at("points")) {
        PathPoint pt;
        pt.lambda = pj.at("lambda").get<double>();
        const auto coef = pj.at("coefficients").get<std::vector<double>>();
        pt.coefficients = Eigen::Map<const Vector>(coef.data(), static_cast<Index>(coef.size()));
        pj.at("active").get_to(pt.active);
        pt.event = event_from(pj.at("event").get<std::string>());
        pt.variable = pj.at("variable").get<Index>();
        path.points.push_back(std::move(pt));
    }
    path.chosen = j.at("chosen").get<Index>();
    j.at("cv_error").get_to(path.cv_error);
    const auto xm = j.at("x_mean").get<std::vector<double>>();
    path.x_mean = Eigen::Map<const Vector>(xm.data(), static_cast<Index>(xm.size()));
    path.y_mean = j.at("y_mean").get<double>();
    j.at("feature_names").get_to(path.feature_names);
    j.at("excluded").get_to(path.excluded);
    path.collinear_warning = j.at("collinear_warning").get<bool>();
    return path;
}

// ---------------------------------------------------------------------------
// boosting
// ---------------------------------------------------------------------------

BoostedModel fit_boosted_linear(const Matrix& x_in, const Vector& y, int m_stop, double nu, bool with_interactions,
                                const std::vector<std::string>& names) {
    check_inputs(x_in, y);
    require(m_stop >= 1, "m_stop must be at least 1");
    require(nu > 0.0 && nu <= 1.0, "step length nu must lie in (0, 1]");
    const Matrix x = with_interactions ? expand_interactions(x_in) : x_in;

    BoostedModel m;
    m.nu = nu;
    m.input_columns = x_in.cols();
    m.interactions = with_interactions;
    if (!names.empty()) m.feature_names = with_interactions ? interaction_names(names) : names;
    m.intercept = y.mean();
    if (x.rows() < 1) return m;

    const Matrix gram = x.transpose() * x;
    Vector xtr = x.transpose() * (y.array() - m.intercept).matrix();
    m.steps.reserve(at(m_stop));
    for (int it = 0; it < m_stop; ++it) {
        Index best = -1;
        double best_score = 0.0;
        for (Index j = 0; j < x.cols(); ++j) {
            const double den = gram(j, j);
            if (!(den > 0.0)) continue;
            // RSS reduction of the univariate fit; the largest reduction is the lowest RSS
            const double score = xtr[j] * xtr[j] / den;
            if (best < 0 || score > best_score) best = j, best_score = score;
        }
        if (best < 0) break;
        const double coef = nu * xtr[best] / gram(best, best);
        m.steps.push_back({best, coef});
        xtr -= coef * gram.col(best);
    }
    return m;
}

Vector BoostedModel::aggregate() const {
    const Index p = interactions ? input_columns + input_columns * (input_columns - 1) / 2 : input_columns;
    Vector agg = Vector::Zero(p);
    for (const BoostStep& s : steps) agg[s.feature] += s.coefficient;
    return agg;
}

Vector BoostedModel::predict(const Matrix& x_in) const {
    if (x_in.cols() != input_columns) throw DataError("boosted model: column count mismatch");
    const Matrix x = interactions ? expand_interactions(x_in) : x_in;
    return (x * aggregate()).array() + intercept;
}

std::vector<double> boosting_training_mse(const BoostedModel& model, const Matrix& x_in, const Vector& y) {
    const Matrix x = model.interactions ? expand_interactions(x_in) : x_in;
    Vector f = Vector::Constant(y.size(), model.intercept);
    std::vector<double> out{(y - f).squaredNorm() / static_cast<double>(y.size())};
    for (const BoostStep& s : model.steps) {
        f += s.coefficient * x.col(s.feature);
        out.push_back((y - f).squaredNorm() / static_cast<double>(y.size()));
    }
    return out;
}

nlohmann::json BoostedModel::to_json() const {
    nlohmann::json st = nlohmann::json::array();
    for (const BoostStep& s : steps) st.push_back({s.feature, s.coefficient});
    return {{"type", "boosted_linear"}, {"intercept", intercept},       {"nu", nu},
            {"input_columns", input_columns}, {"interactions", interactions}, {"feature_names", feature_names},
            {"steps", st}};
}

BoostedModel BoostedModel::from_json(const nlohmann::json& j) {
    BoostedModel m;
    m.intercept = j.at("intercept").get<double>();
    m.nu = j.at("nu").get<double>();
    m.input_columns = j.at("input_columns").get<Index>();
    m.interactions = j.at("interactions").get<bool>();
    j.at("feature_names").get_to(m.feature_names);
    for (const auto& s : j.at("steps")) m.steps.push_back({s.at(0).get<Index>(), s.at(1).get<double>()});
    return m;
}

}  // namespace msreg
