#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flwin/geometry.hpp"
#include "flwin/network.hpp"

namespace flwin {

/// Synthetic federated problem: UE i holds F_i(w) = 1/2 w^T A_i w - b_i^T w
/// and the global loss is F(w) = sum_i S_i F_i(w) / sum_i S_i.
class FederatedTask {
public:
    /// Throws PreconditionError on shape mismatch, nonpositive weights or a
    /// matrix that is not symmetric positive definite.
    FederatedTask(std::vector<Eigen::MatrixXd> hessians, std::vector<Eigen::VectorXd> linear,
                  std::vector<double> weights);

    int dimension() const { return dimension_; }
    std::size_t n_ues() const { return hessians_.size(); }
    const Eigen::MatrixXd& hessian(std::size_t i) const { return hessians_.at(i); }
    const Eigen::VectorXd& linear(std::size_t i) const { return linear_.at(i); }
    const std::vector<double>& weights() const { return weights_; }

    double local_loss(std::size_t i, const Eigen::VectorXd& w) const;
    Eigen::VectorXd local_gradient(std::size_t i, const Eigen::VectorXd& w) const;

    double global_loss(const Eigen::VectorXd& w) const;
    Eigen::VectorXd global_gradient(const Eigen::VectorXd& w) const;

    /// Weighted gradient over the UEs with include[i] != 0, renormalized over
    /// that subset. Returns nullopt when the subset is empty.
    std::optional<Eigen::VectorXd> partial_gradient(const Eigen::VectorXd& w,
                                                    const std::vector<char>& include) const;

    /// w* = (sum S_i A_i)^-1 (sum S_i b_i).
    const Eigen::VectorXd& optimum() const { return optimum_; }
    double optimal_loss() const { return optimal_loss_; }

    /// A_i^-1 v.
    Eigen::VectorXd solve_local(std::size_t i, const Eigen::VectorXd& v) const;

private:
    void check_shape(const Eigen::VectorXd& w) const;

    int dimension_ = 0;
    std::vector<Eigen::MatrixXd> hessians_;
    std::vector<Eigen::VectorXd> linear_;
    std::vector<double> weights_;
    double total_weight_ = 0.0;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
    Eigen::VectorXd optimum_;
    double optimal_loss_ = 0.0;
};

enum class WeightLaw { Equal, Dataset };

/// Random task whose Hessians are Q diag(lambda) Q^T with Q Haar-orthogonal and
/// lambda uniform on [gamma, L]; one eigenvalue is pinned to gamma and (for
/// dimension >= 2) one to L. Minimizers of the local losses are standard
/// normal. Dataset weights follow `law` when weight_law is Dataset.
FederatedTask make_task(std::size_t n_ues, int dimension, double lipschitz_l, double gamma, WeightLaw weight_law,
                        std::uint64_t seed, const DatasetLaw& law = {});

double global_loss(const FederatedTask& task, const Eigen::VectorXd& w);

/// G_i(w_r, h) = F_i(w_r + h) - (grad F_i(w_r) - zeta g)^T h, with g the
/// global gradient broadcast in this round.
double local_subproblem_value(const FederatedTask& task, std::size_t i, const Eigen::VectorXd& w_r,
                              const Eigen::VectorXd& grad_global, const Eigen::VectorXd& h, double zeta);

/// Gradient of G_i with respect to h: A_i h + zeta g.
Eigen::VectorXd local_subproblem_gradient(const FederatedTask& task, std::size_t i, const Eigen::VectorXd& h,
                                          const Eigen::VectorXd& grad_global, double zeta);

/// Closed-form minimizer h* = -zeta A_i^-1 g.
Eigen::VectorXd local_subproblem_minimizer(const FederatedTask& task, std::size_t i,
                                           const Eigen::VectorXd& grad_global, double zeta);

struct FixedIterations {
    std::int64_t tau = 0;
};
struct TargetAccuracy {
    double eps_local = 0.2;
    std::int64_t max_iterations = 10'000'000;
};
using LocalStop = std::variant<FixedIterations, TargetAccuracy>;

struct LocalGdResult {
    Eigen::VectorXd h;             ///< final iterate
    std::int64_t iterations = 0;
    double objective_start = 0.0;  ///< G_i at h = 0
    double objective_end = 0.0;
    double objective_optimum = 0.0;
    double accuracy_ratio = 0.0;   ///< (G(t) - G*) / (G(0) - G*), 0 when G(0) = G*
    std::vector<Eigen::VectorXd> trajectory;  ///< filled when requested, starts at h = 0
    std::vector<double> objective;            ///< G_i along the trajectory, when requested
};

/// Gradient descent h <- h - xi grad G_i from h = 0. Throws PreconditionError
/// when xi >= 2/L and NumericalError when the suboptimality grows or the
/// iteration guard is exhausted.
LocalGdResult local_gd(const FederatedTask& task, std::size_t i, const Eigen::VectorXd& w_r,
                       const Eigen::VectorXd& grad_global, const FlHyperParams& hyper, const LocalStop& stop,
                       bool keep_trajectory = false);

struct LinkMode {
    enum class Kind { Ideal, Stochastic };
    Kind kind = Kind::Ideal;
    std::uint64_t seed = 0;
    /// Fixed per-transmission success probabilities. When unset, every
    /// transmission draws a channel realization and compares it with beta.
    std::optional<double> p_up;
    std::optional<double> p_down;

    static LinkMode ideal() { return {}; }
    static LinkMode stochastic(std::uint64_t seed) { return {Kind::Stochastic, seed, std::nullopt, std::nullopt}; }
    static LinkMode bernoulli(std::uint64_t seed, double p_up, double p_down) {
        return {Kind::Stochastic, seed, p_up, p_down};
    }
};

enum class AggregationPolicy {
    DropFailed,  ///< aggregate only models delivered this round
    ReuseStale   ///< UEs without a fresh delivery contribute their last delivered model
};

struct TrainingOptions {
    std::optional<LocalStop> local_stop;  ///< default: TargetAccuracy{hyper.eps_local}
    AggregationPolicy aggregation = AggregationPolicy::DropFailed;
    std::optional<Eigen::VectorXd> w0;    ///< default: zero vector
};

struct RoundRecord {
    std::int64_t round = 0;
    Eigen::VectorXd global_model;
    double global_loss = 0.0;
    double loss_ratio = 0.0;
    bool skipped = false;
    std::vector<char> gradient_up;   ///< gradient report reached the BS
    std::vector<char> delivered_down;
    std::vector<char> delivered_up;  ///< local model reached the BS
    std::vector<std::int64_t> local_iterations_run;
    std::vector<double> local_objective_start;
    std::vector<double> local_objective_end;
    double gradient_error_norm = 0.0;  ///< |partial - exact global gradient|

    std::int64_t n_up_success() const;
    std::int64_t n_down_success() const;
};

struct TrainingTrace {
    std::vector<RoundRecord> rounds;  ///< rounds[0] holds w_0
    bool converged = false;
    std::int64_t rounds_to_target = -1;  ///< first round with loss ratio <= eps_global
    double achieved_eps_global = 1.0;
    double achieved_eps_local = 0.0;     ///< worst local accuracy ratio observed
};

/// Federated loop: each round the BS gathers local gradients, broadcasts w_r
/// and the aggregated gradient, UEs that receive it run local GD, and the
/// delivered models are averaged with dataset weights. Stops as soon as
/// (F(w_r) - F*) / (F(w_0) - F*) <= eps_global or after max_rounds rounds.
TrainingTrace run_federated(const FederatedTask& task, const NetworkConfig& config, const PathLossModel& model,
                            const FlHyperParams& hyper, const LinkMode& link, std::int64_t max_rounds,
                            const TrainingOptions& options = {});

std::string trace_to_json(const TrainingTrace& trace);

}  // namespace flwin
