#include "qsync/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace qsync {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

Eigen::Index check_sites(int sites)
{
    if (sites < 1 || sites > kMaxSites)
        throw DimensionTooLarge("number of sites must be in [1, " + std::to_string(kMaxSites) + "], got " +
                                std::to_string(sites));
    return Eigen::Index{1} << sites;
}

bool excited(Eigen::Index state, int site) { return (state >> site) & 1; }

}  // namespace

DensityMatrix product_state(const BlochVectord& m, int sites)
{
    check_sites(sites);
    // single-site matrix indexed [bra bit][ket bit], bit 1 = excited
    Eigen::Matrix2cd one;
    one(1, 1) = 0.5 * (1.0 + m(2));
    one(0, 0) = 0.5 * (1.0 - m(2));
    one(0, 1) = cd(m(0), m(1)) * 0.5;
    one(1, 0) = cd(m(0), -m(1)) * 0.5;

    const Eigen::Index dim = Eigen::Index{1} << sites;
    DensityMatrix rho(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b)
        for (Eigen::Index a = 0; a < dim; ++a) {
            cd v = 1.0;
            for (int i = 0; i < sites; ++i) v *= one(excited(a, i), excited(b, i));
            rho(a, b) = v;
        }
    return rho;
}

Liouvillian::Liouvillian(const EnsembleParams& p, int sites, OracleModel model)
    : params_(p), sites_(sites), dim_(check_sites(sites))
{
    p.validate();

    const double n = static_cast<double>(sites);
    const double s = std::sin(p.theta);
    std::vector<Eigen::Triplet<cd>> triplets;

    cd exchange_fwd = 0.0;  // coefficient of s+_i s-_j for i < j
    cd exchange_bwd = 0.0;  // coefficient of s+_j s-_i for i < j
    if (model == OracleModel::collective) {
        exchange_fwd = exchange_bwd = p.V * std::cos(p.theta) / n;
        collective_rate_ = 2.0 * p.V * std::abs(s) / n;
        collective_lowering_ = s > 0.0;
    } else {
        exchange_fwd = p.V / n * std::exp(I * p.theta);
        exchange_bwd = std::conj(exchange_fwd);
    }

    for (Eigen::Index b = 0; b < dim_; ++b) {
        // diagonal: precession and the -i/2 sum_k L_k^dag L_k of the local jumps
        double energy = 0.0;
        double loss = 0.0;
        int n_up = 0;
        for (int i = 0; i < sites; ++i) {
            const bool up = excited(b, i);
            energy += 0.5 * p.omega0 * (up ? 1.0 : -1.0);
            loss += up ? p.gamma_minus : p.gamma_plus;
            n_up += up;
        }
        if (collective_rate_ > 0.0) {
            // diagonal part of J^dag J: number of sites J can act on
            loss += collective_rate_ * (collective_lowering_ ? n_up : sites - n_up);
        }
        triplets.emplace_back(b, b, cd(energy, -0.5 * loss));

        // s+_i s-_j |b> for j excited, i not: moves the excitation from j to i
        for (int j = 0; j < sites; ++j) {
            if (!excited(b, j)) continue;
            for (int i = 0; i < sites; ++i) {
                if (i == j || excited(b, i)) continue;
                const Eigen::Index target = (b & ~(Eigen::Index{1} << j)) | (Eigen::Index{1} << i);
                cd amp = i < j ? exchange_fwd : exchange_bwd;
                if (collective_rate_ > 0.0 && collective_lowering_) amp += cd(0.0, -0.5 * collective_rate_);
                triplets.emplace_back(target, b, amp);
            }
        }
        if (collective_rate_ > 0.0 && !collective_lowering_) {
            // J = sum s+: J^dag J = sum_{ij} s-_i s+_j moves an excitation from i to j
            for (int i = 0; i < sites; ++i) {
                if (!excited(b, i)) continue;
                for (int j = 0; j < sites; ++j) {
                    if (j == i || excited(b, j)) continue;
                    const Eigen::Index target = (b & ~(Eigen::Index{1} << i)) | (Eigen::Index{1} << j);
                    triplets.emplace_back(target, b, cd(0.0, -0.5 * collective_rate_));
                }
            }
        }
    }
    h_eff_.resize(dim_, dim_);
    h_eff_.setFromTriplets(triplets.begin(), triplets.end());
    h_eff_.makeCompressed();
}

void Liouvillian::apply(const Eigen::Ref<const DensityMatrix>& rho, DensityMatrix& out) const
{
    // -i (H_eff rho - rho H_eff^dag) = -i (K - K^dag) with K = H_eff rho, rho Hermitian
    scratch_.noalias() = h_eff_ * rho;
    out = -I * (scratch_ - scratch_.adjoint());

    for (int i = 0; i < sites_; ++i) {
        const Eigen::Index mask = Eigen::Index{1} << i;
        for (Eigen::Index b = 0; b < dim_; ++b) {
            const bool b_up = b & mask;
            for (Eigen::Index a = 0; a < dim_; ++a) {
                const bool a_up = a & mask;
                if (a_up != b_up) continue;
                if (!a_up)
                    out(a, b) += params_.gamma_minus * rho(a | mask, b | mask);
                else
                    out(a, b) += params_.gamma_plus * rho(a ^ mask, b ^ mask);
            }
        }
    }
    if (collective_rate_ > 0.0) apply_collective(rho, out);
}

void Liouvillian::apply_collective(const Eigen::Ref<const DensityMatrix>& rho, DensityMatrix& out) const
{
    // out += rate * J rho J^dag, J = sum s-_i (lowering) or sum s+_i
    DensityMatrix& j_rho = scratch_;
    j_rho.setZero(dim_, dim_);
    for (Eigen::Index b = 0; b < dim_; ++b)
        for (Eigen::Index a = 0; a < dim_; ++a) {
            cd acc = 0.0;
            for (int i = 0; i < sites_; ++i) {
                const Eigen::Index mask = Eigen::Index{1} << i;
                const bool up = a & mask;
                if (collective_lowering_ && !up) acc += rho(a | mask, b);
                if (!collective_lowering_ && up) acc += rho(a ^ mask, b);
            }
            j_rho(a, b) = acc;
        }
    collective_.setZero(dim_, dim_);
    for (Eigen::Index b = 0; b < dim_; ++b)
        for (int j = 0; j < sites_; ++j) {
            const Eigen::Index mask = Eigen::Index{1} << j;
            const bool up = b & mask;
            if (collective_lowering_ == up) continue;
            const Eigen::Index col = collective_lowering_ ? (b | mask) : (b ^ mask);
            collective_.col(b) += j_rho.col(col);
        }
    // (a, b) and (b, a) are summed in different orders; symmetrize so that rho
    // stays exactly Hermitian, which the K - K^dag form in apply() relies on
    out += (0.5 * collective_rate_) * (collective_ + collective_.adjoint());
}

DensityMatrix Liouvillian::apply(const Eigen::Ref<const DensityMatrix>& rho) const
{
    DensityMatrix out(dim_, dim_);
    apply(rho, out);
    return out;
}

DensityMatrix liouvillian_apply(const DensityMatrix& rho, const EnsembleParams& p, int sites, OracleModel model)
{
    check_sites(sites);
    const Eigen::Index dim = Eigen::Index{1} << sites;
    if (rho.rows() != dim || rho.cols() != dim)
        throw std::invalid_argument("density matrix dimension does not match 2^N");
    return Liouvillian(p, sites, model).apply(rho);
}

ExactSeries evolve_exact(const DensityMatrix& rho0, const EnsembleParams& p, int sites, double t_end,
                         double dt_sample, const OracleOptions& options)
{
    const Liouvillian generator(p, sites, options.model);
    const Eigen::Index dim = generator.dim();
    if (rho0.rows() != dim || rho0.cols() != dim)
        throw std::invalid_argument("initial density matrix dimension does not match 2^N");

    using State = Eigen::VectorXd;
    const Eigen::Index n = dim * dim;
    State x(2 * n);
    Eigen::Map<DensityMatrix>(reinterpret_cast<cd*>(x.data()), dim, dim) = rho0;

    DensityMatrix out(dim, dim);
    const auto flow = [&generator, &out, dim, n](const State& s) {
        const Eigen::Map<const DensityMatrix> rho(reinterpret_cast<const cd*>(s.data()), dim, dim);
        generator.apply(rho, out);
        State ds(2 * n);
        Eigen::Map<DensityMatrix>(reinterpret_cast<cd*>(ds.data()), dim, dim) = out;
        return ds;
    };

    ExactSeries series;
    series.dt_sample = dt_sample;
    Eigen::SelfAdjointEigenSolver<DensityMatrix> eigen;
    integrate_observed<State>(flow, x, t_end, dt_sample, options.integrator, [&](long, double t, const State& s) {
        const Eigen::Map<const DensityMatrix> rho(reinterpret_cast<const cd*>(s.data()), dim, dim);
        ExactSample sample;
        sample.t = t;
        sample.sigma_plus.setZero(sites);
        sample.sigma_z.setZero(sites);
        for (int i = 0; i < sites; ++i) {
            const Eigen::Index mask = Eigen::Index{1} << i;
            for (Eigen::Index a = 0; a < dim; ++a) {
                if (a & mask) {
                    sample.sigma_z(i) += rho(a, a).real();
                } else {
                    sample.sigma_z(i) -= rho(a, a).real();
                    sample.sigma_plus(i) += rho(a, a | mask);
                }
            }
        }
        sample.trace_error = std::abs(rho.trace() - 1.0);
        sample.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        if (options.monitor_positivity) {
            eigen.compute(rho, Eigen::EigenvaluesOnly);
            sample.min_eigenvalue = eigen.eigenvalues().minCoeff();
            if (sample.min_eigenvalue < -options.positivity_tolerance)
                throw PositivityBreach("density matrix lost positivity at t=" + std::to_string(t) +
                                       ": smallest eigenvalue " + std::to_string(sample.min_eigenvalue));
        }
        series.samples.push_back(std::move(sample));
    });
    return series;
}

EnsembleParams finite_size_params(const EnsembleParams& p, int sites)
{
    check_sites(sites);
    const double n = static_cast<double>(sites);
    EnsembleParams q = p;
    q.V = p.V * (n - 1.0) / n;
    const double s = std::sin(p.theta);
    const double onsite = 2.0 * p.V * std::abs(s) / n;
    if (s > 0.0) q.gamma_minus += onsite;
    if (s < 0.0) q.gamma_plus += onsite;
    return q;
}

double meanfield_deviation(const ExactSeries& exact, const Trajectory& meanfield)
{
    const std::size_t n = std::min<std::size_t>(exact.samples.size(), static_cast<std::size_t>(meanfield.size()));
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto mf = sigma_plus(meanfield.a.col(static_cast<Eigen::Index>(k)));
        worst = std::max(worst, std::abs(exact.samples[k].mean_sigma_plus() - mf));
    }
    return worst;
}

}  // namespace qsync
