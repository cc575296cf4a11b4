#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ccm/gumbel.hpp"

namespace ccm {

// Latent shock rates: one systemic rate plus d idiosyncratic rates.  Rates
// are per annum on the distortion scale, so the observed default intensity
// of entity k is (lambda0 + lambdas[k])^(1/theta).
struct ShockIntensities {
    double lambda0;
    std::vector<double> lambdas;

    ShockIntensities(double l0, std::vector<double> ls);
    std::size_t dim() const { return lambdas.size(); }
};

// Cluster parameters: systemic sensitivities alpha_k in [0,1] and the common
// contagion parameter theta >= 1.  alpha_k = 1 means the entity defaults
// exactly at the systemic shock; alpha_k = 0 means it never feels it.
struct ModelParams {
    std::vector<double> alphas;
    double theta;
    std::vector<std::string> labels;

    ModelParams(std::vector<double> a, double t, std::vector<std::string> l = {});
    std::size_t dim() const { return alphas.size(); }
};

// Symmetric matrix of pairwise Kendall taus with unit diagonal.  NaN marks a
// pair whose tau is undefined (constant input series).
class TauMatrix {
  public:
    explicit TauMatrix(std::vector<std::string> labels);

    std::size_t dim() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    double at(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double v);
    bool has_defined_offdiagonal() const;

  private:
    std::vector<std::string> labels_;
    std::vector<double> m_;
};

// Survival of entity k's observed default time: exp(-mu_k t) with
// mu_k = (lambda0 + lambdak)^(1/theta).
double marginal_survival(double t, double lambda0, double lambdak,
                         const GumbelGenerator& gen);

// Joint survival of the d observed default times:
// exp{-(lambda0 max(t)^theta + sum_k lambda_k t_k^theta)^(1/theta)}.
double joint_survival(const std::vector<double>& ts, const ShockIntensities& shocks,
                      const GumbelGenerator& gen);

// Survival copula of the observed default times.  The min structure makes it
// piecewise: the active piece is chosen by the largest alpha_i^(1/theta) *
// (-ln u_i), ties broken toward the smallest index.
double survival_copula(const std::vector<double>& us, const ModelParams& params);

// Two-entity closed form of survival_copula.
double bivariate_copula(double u, double v, double alpha_j, double alpha_k,
                        const GumbelGenerator& gen);

// Kendall tau of a Marshall-Olkin pair: alpha_j alpha_k / (alpha_j + alpha_k
// - alpha_j alpha_k), with tau_mo(0,0) = 0 by continuity.
double tau_mo(double alpha_j, double alpha_k);

// Kendall tau of an observed default-time pair: (theta-1)/theta + tau_mo/theta.
double tau_pair(double alpha_j, double alpha_k, const GumbelGenerator& gen);

// Kendall tau between the systemic arrival time and entity j's default time:
// (theta-1)/theta + alpha_j/theta, affine in alpha_j.
double tau_systemic(double alpha_j, const GumbelGenerator& gen);

// Componentwise lambda0 / (lambda0 + lambda_k).
std::vector<double> alphas_from_intensities(const ShockIntensities& shocks);

using SurvivalFn = std::function<double(double)>;

// Kendall tau of the observed pair for arbitrary continuous, strictly
// decreasing shock survival functions (systemic s0, idiosyncratic sj, sk)
// coupled by the given generator:
//   tau = (theta-1)/theta + (4/theta) Int_0^1 s (-ln s)^(1-theta) T((-ln s)^theta) ds
// with T = psi_inv . s0 . H^{-1} and H = psi_inv.s0 + psi_inv.sj + psi_inv.sk.
double kendall_tau_general(const GumbelGenerator& gen, const SurvivalFn& s0,
                           const SurvivalFn& sj, const SurvivalFn& sk);

}  // namespace ccm
