#include "flwin/fl_engine.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>

#include "flwin/errors.hpp"
#include "flwin/monte_carlo.hpp"
#include "flwin/random.hpp"

namespace flwin {

FederatedTask::FederatedTask(std::vector<Eigen::MatrixXd> hessians, std::vector<Eigen::VectorXd> linear,
                             std::vector<double> weights)
    : hessians_(std::move(hessians)), linear_(std::move(linear)), weights_(std::move(weights)) {
    const std::size_t n = hessians_.size();
    if (n == 0) throw PreconditionError("task needs at least one UE");
    if (linear_.size() != n || weights_.size() != n) throw PreconditionError("task component counts differ");
    dimension_ = static_cast<int>(hessians_[0].rows());
    if (dimension_ < 1) throw PreconditionError("task dimension must be at least 1");

    Eigen::MatrixXd a_sum = Eigen::MatrixXd::Zero(dimension_, dimension_);
    Eigen::VectorXd b_sum = Eigen::VectorXd::Zero(dimension_);
    factors_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = hessians_[i];
        if (a.rows() != dimension_ || a.cols() != dimension_ || linear_[i].size() != dimension_) {
            throw PreconditionError("task matrix or vector has the wrong shape");
        }
        if ((a - a.transpose()).norm() > 1e-12 * std::max(1.0, a.norm())) {
            throw PreconditionError("local Hessian is not symmetric");
        }
        if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
            throw PreconditionError("aggregation weights must be positive");
        }
        factors_.emplace_back(a);
        if (factors_.back().info() != Eigen::Success) {
            throw PreconditionError("local Hessian is not positive definite");
        }
        a_sum += weights_[i] * a;
        b_sum += weights_[i] * linear_[i];
        total_weight_ += weights_[i];
    }
    optimum_ = a_sum.llt().solve(b_sum);
    optimal_loss_ = global_loss(optimum_);
}

void FederatedTask::check_shape(const Eigen::VectorXd& w) const {
    if (w.size() != dimension_) throw PreconditionError("model vector has the wrong dimension");
}

double FederatedTask::local_loss(std::size_t i, const Eigen::VectorXd& w) const {
    check_shape(w);
    return 0.5 * w.dot(hessians_.at(i) * w) - linear_.at(i).dot(w);
}

Eigen::VectorXd FederatedTask::local_gradient(std::size_t i, const Eigen::VectorXd& w) const {
    check_shape(w);
    return hessians_.at(i) * w - linear_.at(i);
}

double FederatedTask::global_loss(const Eigen::VectorXd& w) const {
    double total = 0.0;
    for (std::size_t i = 0; i < n_ues(); ++i) total += weights_[i] * local_loss(i, w);
    return total / total_weight_;
}

Eigen::VectorXd FederatedTask::global_gradient(const Eigen::VectorXd& w) const {
    return *partial_gradient(w, std::vector<char>(n_ues(), 1));
}

std::optional<Eigen::VectorXd> FederatedTask::partial_gradient(const Eigen::VectorXd& w,
                                                               const std::vector<char>& include) const {
    check_shape(w);
    if (include.size() != n_ues()) throw PreconditionError("participation mask has the wrong length");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension_);
    double weight = 0.0;
    for (std::size_t i = 0; i < n_ues(); ++i) {
        if (!include[i]) continue;
        g += weights_[i] * local_gradient(i, w);
        weight += weights_[i];
    }
    if (weight == 0.0) return std::nullopt;
    return g / weight;
}

Eigen::VectorXd FederatedTask::solve_local(std::size_t i, const Eigen::VectorXd& v) const {
    check_shape(v);
    return factors_.at(i).solve(v);
}

FederatedTask make_task(std::size_t n_ues, int dimension, double lipschitz_l, double gamma, WeightLaw weight_law,
                        std::uint64_t seed, const DatasetLaw& law) {
    if (!(gamma > 0.0) || !(gamma <= lipschitz_l) || !std::isfinite(lipschitz_l)) {
        throw PreconditionError("curvature range needs 0 < gamma <= L");
    }
    if (dimension < 1) throw PreconditionError("dimension must be at least 1");
    if (n_ues == 0) throw PreconditionError("task needs at least one UE");
    if (weight_law == WeightLaw::Dataset) law.validate();

    Rng rng(derive_seed(seed, streams::kTask, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Eigen::MatrixXd> hessians;
    std::vector<Eigen::VectorXd> linear;
    std::vector<double> weights;
    for (std::size_t i = 0; i < n_ues; ++i) {
        Eigen::MatrixXd z(dimension, dimension);
        for (int c = 0; c < dimension; ++c)
            for (int r = 0; r < dimension; ++r) z(r, c) = normal(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
        Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd rr = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int c = 0; c < dimension; ++c) {
            if (rr(c, c) < 0.0) q.col(c) *= -1.0;
        }

        Eigen::VectorXd spectrum(dimension);
        for (int k = 0; k < dimension; ++k) spectrum(k) = gamma + (lipschitz_l - gamma) * unit(rng);
        spectrum(0) = gamma;
        if (dimension >= 2) spectrum(1) = lipschitz_l;

        Eigen::MatrixXd a = q * spectrum.asDiagonal() * q.transpose();
        a = 0.5 * (a + a.transpose()).eval();

        Eigen::VectorXd center(dimension);
        for (int k = 0; k < dimension; ++k) center(k) = normal(rng);
        linear.push_back(a * center);
        hessians.push_back(std::move(a));

        if (weight_law == WeightLaw::Equal) {
            weights.push_back(1.0);
        } else {
            const double mu = law.mu_min + (law.mu_max - law.mu_min) * unit(rng);
            const double sigma = law.sigma_min + (law.sigma_max - law.sigma_min) * unit(rng);
            std::normal_distribution<double> size_law(mu, sigma);
            weights.push_back(std::max(1.0, std::nearbyint(size_law(rng))));
        }
    }
    return FederatedTask(std::move(hessians), std::move(linear), std::move(weights));
}

double global_loss(const FederatedTask& task, const Eigen::VectorXd& w) { return task.global_loss(w); }

double local_subproblem_value(const FederatedTask& task, std::size_t i, const Eigen::VectorXd& w_r,
                              const Eigen::VectorXd& grad_global, const Eigen::VectorXd& h, double zeta) {
    if (grad_global.size() != task.dimension() || h.size() != task.dimension()) {
        throw PreconditionError("subproblem vectors have the wrong dimension");
    }
    return task.local_loss(i, w_r + h) - (task.local_gradient(i, w_r) - zeta * grad_global).dot(h);
}

Eigen::VectorXd local_subproblem_gradient(const FederatedTask& task, std::size_t i, const Eigen::VectorXd& h,
                                          const Eigen::VectorXd& grad_global, double zeta) {
    return task.hessian(i) * h + zeta * grad_global;
}

Eigen::VectorXd local_subproblem_minimizer(const FederatedTask& task, std::size_t i,
                                           const Eigen::VectorXd& grad_global, double zeta) {
    return -zeta * task.solve_local(i, grad_global);
}

LocalGdResult local_gd(const FederatedTask& task, std::size_t i, const Eigen::VectorXd& w_r,
                       const Eigen::VectorXd& grad_global, const FlHyperParams& hyper, const LocalStop& stop,
                       bool keep_trajectory) {
    const double xi = hyper.gd_step_xi;
    const double zeta = hyper.zeta;
    if (!(xi > 0.0) || !(xi < 2.0 / hyper.lipschitz_l)) {
        throw PreconditionError("local step size must satisfy 0 < xi < 2/L");
    }
    const auto& a = task.hessian(i);
    const Eigen::VectorXd h_star = local_subproblem_minimizer(task, i, grad_global, zeta);
    // G(h) - G* = 1/2 (h - h*)^T A (h - h*) for the quadratic subproblem.
    auto gap = [&](const Eigen::VectorXd& h) {
        const Eigen::VectorXd e = h - h_star;
        return 0.5 * e.dot(a * e);
    };

    LocalGdResult out;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(task.dimension());
    out.objective_start = local_subproblem_value(task, i, w_r, grad_global, h, zeta);
    out.objective_optimum = local_subproblem_value(task, i, w_r, grad_global, h_star, zeta);
    const double gap0 = gap(h);
    if (keep_trajectory) {
        out.trajectory.push_back(h);
        out.objective.push_back(out.objective_start);
    }

    const bool fixed = std::holds_alternative<FixedIterations>(stop);
    std::int64_t limit = 0;
    double target = 0.0;
    if (fixed) {
        limit = std::get<FixedIterations>(stop).tau;
        if (limit < 0) throw PreconditionError("number of local iterations must be nonnegative");
    } else {
        const auto& t = std::get<TargetAccuracy>(stop);
        if (!(t.eps_local > 0.0 && t.eps_local <= 1.0)) throw PreconditionError("eps_local must lie in (0, 1]");
        target = t.eps_local;
        limit = t.max_iterations;
    }

    double current = gap0;
    std::int64_t t = 0;
    if (gap0 > 0.0) {
        while (t < limit) {
            if (!fixed && current <= target * gap0) break;
            h -= xi * local_subproblem_gradient(task, i, h, grad_global, zeta);
            ++t;
            const double next = gap(h);
            if (!std::isfinite(next) || next > current * (1.0 + 1e-12)) {
                throw NumericalError("local gradient descent increased the objective", next / gap0);
            }
            current = next;
            if (keep_trajectory) {
                out.trajectory.push_back(h);
                out.objective.push_back(local_subproblem_value(task, i, w_r, grad_global, h, zeta));
            }
        }
        if (!fixed && current > target * gap0) {
            throw NumericalError("local gradient descent hit the iteration limit", current / gap0);
        }
    }
    out.iterations = t;
    out.accuracy_ratio = gap0 > 0.0 ? current / gap0 : 0.0;
    out.objective_end = local_subproblem_value(task, i, w_r, grad_global, h, zeta);
    out.h = std::move(h);
    return out;
}

std::int64_t RoundRecord::n_up_success() const {
    return std::count_if(delivered_up.begin(), delivered_up.end(), [](char c) { return c != 0; });
}

std::int64_t RoundRecord::n_down_success() const {
    return std::count_if(delivered_down.begin(), delivered_down.end(), [](char c) { return c != 0; });
}

namespace {

/// Draws one transmission outcome per call from the round's stream.
class LinkSampler {
public:
    LinkSampler(const LinkMode& link, const NetworkConfig& config, const PathLossModel& model)
        : link_(link), config_(config), model_(model), beta_up_(config.beta_up()), beta_down_(config.beta_down()) {}

    bool uplink(Rng& rng) const {
        if (link_.kind == LinkMode::Kind::Ideal) return true;
        if (link_.p_up) return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < *link_.p_up;
        const auto sinr = draw_uplink_sinr(config_, model_, rng);
        return sinr && *sinr > beta_up_;
    }
    bool downlink(Rng& rng) const {
        if (link_.kind == LinkMode::Kind::Ideal) return true;
        if (link_.p_down) return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < *link_.p_down;
        const auto snr = draw_downlink_snr(config_, model_, rng);
        return snr && *snr > beta_down_;
    }

private:
    const LinkMode& link_;
    const NetworkConfig& config_;
    const PathLossModel& model_;
    double beta_up_;
    double beta_down_;
};

}  // namespace

TrainingTrace run_federated(const FederatedTask& task, const NetworkConfig& config, const PathLossModel& model,
                            const FlHyperParams& hyper, const LinkMode& link, std::int64_t max_rounds,
                            const TrainingOptions& options) {
    hyper.validate();
    if (max_rounds < 1) throw PreconditionError("max_rounds must be at least 1");
    if (link.kind == LinkMode::Kind::Stochastic) {
        if (!link.p_up || !link.p_down) config.validate();
        for (const auto& p : {link.p_up, link.p_down}) {
            if (p && !(*p >= 0.0 && *p <= 1.0)) throw PreconditionError("link probabilities must lie in [0, 1]");
        }
    }
    const LocalStop stop = options.local_stop.value_or(TargetAccuracy{hyper.eps_local});
    const std::size_t n = task.n_ues();
    const LinkSampler sampler(link, config, model);

    Eigen::VectorXd w = options.w0.value_or(Eigen::VectorXd::Zero(task.dimension()));
    if (w.size() != task.dimension()) throw PreconditionError("initial model has the wrong dimension");
    const double f_star = task.optimal_loss();
    const double gap0 = task.global_loss(w) - f_star;
    auto ratio_of = [&](double loss) { return gap0 > 0.0 ? std::max(0.0, loss - f_star) / gap0 : 0.0; };

    TrainingTrace trace;
    RoundRecord first;
    first.global_model = w;
    first.global_loss = task.global_loss(w);
    first.loss_ratio = ratio_of(first.global_loss);
    trace.rounds.push_back(std::move(first));

    // Last model of each UE known to the BS, for the stale-reuse policy.
    std::vector<Eigen::VectorXd> last_delivered(n, w);
    double worst_local = 0.0;

    for (std::int64_t r = 0; r < max_rounds; ++r) {
        if (trace.rounds.back().loss_ratio <= hyper.eps_global) break;

        Rng rng(derive_seed(link.seed, streams::kTraining, static_cast<std::uint64_t>(r)));
        RoundRecord rec;
        rec.round = r + 1;
        rec.gradient_up.assign(n, 0);
        rec.delivered_down.assign(n, 0);
        rec.delivered_up.assign(n, 0);
        rec.local_iterations_run.assign(n, 0);
        rec.local_objective_start.assign(n, std::nan(""));
        rec.local_objective_end.assign(n, std::nan(""));
        for (std::size_t i = 0; i < n; ++i) {
            rec.gradient_up[i] = sampler.uplink(rng);
            rec.delivered_down[i] = sampler.downlink(rng);
            rec.delivered_up[i] = sampler.uplink(rng);
        }

        const auto grad = task.partial_gradient(w, rec.gradient_up);
        Eigen::VectorXd next = w;
        bool aggregated = false;
        if (grad) {
            rec.gradient_error_norm = (*grad - task.global_gradient(w)).norm();
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(task.dimension());
            double weight = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (rec.delivered_down[i]) {
                    const auto local = local_gd(task, i, w, *grad, hyper, stop);
                    rec.local_iterations_run[i] = local.iterations;
                    rec.local_objective_start[i] = local.objective_start;
                    rec.local_objective_end[i] = local.objective_end;
                    worst_local = std::max(worst_local, local.accuracy_ratio);
                    if (rec.delivered_up[i]) last_delivered[i] = w + local.h;
                }
                const bool fresh = rec.delivered_down[i] && rec.delivered_up[i];
                if (fresh || options.aggregation == AggregationPolicy::ReuseStale) {
                    sum += task.weights()[i] * last_delivered[i];
                    weight += task.weights()[i];
                    aggregated = aggregated || fresh;
                }
            }
            if (aggregated) next = sum / weight;
        }
        rec.skipped = !aggregated;
        w = next;
        rec.global_model = w;
        rec.global_loss = task.global_loss(w);
        rec.loss_ratio = ratio_of(rec.global_loss);
        trace.rounds.push_back(std::move(rec));
    }

    for (const auto& rec : trace.rounds) {
        if (rec.loss_ratio <= hyper.eps_global) {
            trace.rounds_to_target = rec.round;
            break;
        }
    }
    trace.converged = trace.rounds_to_target >= 0;
    trace.achieved_eps_global = trace.rounds.back().loss_ratio;
    trace.achieved_eps_local = worst_local;
    return trace;
}

std::string trace_to_json(const TrainingTrace& trace) {
    using nlohmann::json;
    auto bools = [](const std::vector<char>& v) {
        json a = json::array();
        for (char c : v) a.push_back(c != 0);
        return a;
    };
    auto nullable = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(std::isnan(x) ? json(nullptr) : json(x));
        return a;
    };
    json rounds = json::array();
    for (const auto& rec : trace.rounds) {
        rounds.push_back({
            {"round", rec.round},
            {"global_model", std::vector<double>(rec.global_model.data(),
                                                 rec.global_model.data() + rec.global_model.size())},
            {"global_loss", rec.global_loss},
            {"loss_ratio", rec.loss_ratio},
            {"skipped", rec.skipped},
            {"gradient_up", bools(rec.gradient_up)},
            {"delivered_down", bools(rec.delivered_down)},
            {"delivered_up", bools(rec.delivered_up)},
            {"local_iterations_run", rec.local_iterations_run},
            {"local_objective_start", nullable(rec.local_objective_start)},
            {"local_objective_end", nullable(rec.local_objective_end)},
            {"gradient_error_norm", rec.gradient_error_norm},
        });
    }
    json doc = {
        {"converged", trace.converged},
        {"rounds_to_target", trace.rounds_to_target},
        {"achieved_eps_global", trace.achieved_eps_global},
        {"achieved_eps_local", trace.achieved_eps_local},
        {"rounds", std::move(rounds)},
    };
    return doc.dump(2);
}

}  // namespace flwin
