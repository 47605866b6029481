#include "evo/noise.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

namespace evo {

namespace {

RealRowMatrix compute_field(const std::vector<double>& lambdas, const RealRowMatrix& embedding,
                            const RealRowMatrix& increments) {
    if (embedding.cols() == 0) {
        return RealRowMatrix(increments.rows(), 0);
    }
    RealRowMatrix scaled = increments;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        scaled.col(static_cast<Eigen::Index>(k)) *= std::sqrt(lambdas[k]);
    }
    return scaled * embedding;
}

void check_lambdas(const std::vector<double>& lambdas) {
    if (lambdas.empty()) {
        throw ParameterError("WienerPath: at least one mode is required");
    }
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] >= 0.0) || !std::isfinite(lambdas[k])) {
            throw ParameterError("WienerPath: lambda_" + std::to_string(k + 1) + " must be finite and non-negative");
        }
    }
}

double clip(double x) { return std::clamp(x, -1.0, 1.0); }

} // namespace

EigenSequence parse_eigen_sequence(const std::string& name) {
    if (name == "inverse_square") {
        return EigenSequence::InverseSquare;
    }
    if (name == "geometric") {
        return EigenSequence::Geometric;
    }
    throw ParameterError("unknown eigenvalue sequence '" + name + "' (expected inverse_square or geometric)");
}

std::string to_string(EigenSequence seq) {
    return seq == EigenSequence::InverseSquare ? "inverse_square" : "geometric";
}

std::vector<double> eigenvalues(EigenSequence seq, std::size_t n_modes) {
    std::vector<double> out(n_modes);
    for (std::size_t k = 1; k <= n_modes; ++k) {
        const auto kd = static_cast<double>(k);
        out[k - 1] = seq == EigenSequence::InverseSquare ? 1.0 / (kd * kd) : std::ldexp(1.0, -static_cast<int>(k));
    }
    return out;
}

double tail_mass(EigenSequence seq, std::size_t n_modes) {
    if (seq == EigenSequence::Geometric) {
        return std::ldexp(1.0, -static_cast<int>(n_modes));
    }
    // pi^2/6 minus the partial sum, summed from the small end.
    double partial = 0.0;
    for (std::size_t k = n_modes; k >= 1; --k) {
        const auto kd = static_cast<double>(k);
        partial += 1.0 / (kd * kd);
    }
    return std::numbers::pi * std::numbers::pi / 6.0 - partial;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

WienerPath::WienerPath(TimeGrid grid, std::vector<double> lambdas, RealRowMatrix embedding,
                       RealRowMatrix increments)
    : grid_(grid), lambdas_(std::move(lambdas)), embedding_(std::move(embedding)),
      increments_(std::move(increments)) {
    check_lambdas(lambdas_);
    const auto k = static_cast<Eigen::Index>(lambdas_.size());
    if (increments_.rows() != static_cast<Eigen::Index>(grid_.n_steps()) || increments_.cols() != k) {
        throw ShapeError("WienerPath: increments must be n_steps x K");
    }
    if (embedding_.rows() != k) {
        throw ShapeError("WienerPath: embedding must have K rows, got " + std::to_string(embedding_.rows()));
    }
    // W(t) = 0 for t <= t0: the first row carries no increment, and nodes at
    // negative times carry none either.
    for (std::size_t n = 0; n < grid_.n_steps(); ++n) {
        if (n == 0 || grid_.time(n) <= 0.0) {
            increments_.row(static_cast<Eigen::Index>(n)).setZero();
        }
    }
    field_ = compute_field(lambdas_, embedding_, increments_);
}

WienerPath WienerPath::sample(const TimeGrid& grid, std::vector<double> lambdas, RealRowMatrix embedding,
                              std::uint64_t seed, std::uint64_t stream) {
    check_lambdas(lambdas);
    std::mt19937_64 rng = make_rng(seed, stream);
    std::normal_distribution<double> normal(0.0, std::sqrt(grid.dt()));
    const auto n = static_cast<Eigen::Index>(grid.n_steps());
    const auto k = static_cast<Eigen::Index>(lambdas.size());
    RealRowMatrix inc = RealRowMatrix::Zero(n, k);
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
            inc(i, j) = normal(rng);
        }
    }
    return WienerPath(grid, std::move(lambdas), std::move(embedding), std::move(inc));
}

WienerPath WienerPath::from_increments(const TimeGrid& grid, std::vector<double> lambdas, RealRowMatrix embedding,
                                       RealRowMatrix increments) {
    return WienerPath(grid, std::move(lambdas), std::move(embedding), std::move(increments));
}

RealRowMatrix WienerPath::values() const {
    RealRowMatrix w = increments_;
    for (Eigen::Index i = 1; i < w.rows(); ++i) {
        w.row(i) += w.row(i - 1);
    }
    return w;
}

WienerPath WienerPath::coarsened(std::size_t factor) const {
    if (factor == 0) {
        throw ParameterError("WienerPath::coarsened: factor must be positive");
    }
    const std::size_t n = grid_.n_steps();
    if ((n - 1) % factor != 0) {
        throw ParameterError("WienerPath::coarsened: n_steps - 1 = " + std::to_string(n - 1) +
                             " is not divisible by " + std::to_string(factor));
    }
    const std::size_t m = (n - 1) / factor + 1;
    const TimeGrid coarse(grid_.dt() * static_cast<double>(factor), m, grid_.nu(), grid_.t0());
    RealRowMatrix inc = RealRowMatrix::Zero(static_cast<Eigen::Index>(m), increments_.cols());
    for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = (i - 1) * factor + 1; j <= i * factor; ++j) {
            inc.row(static_cast<Eigen::Index>(i)) += increments_.row(static_cast<Eigen::Index>(j));
        }
    }
    return WienerPath(coarse, lambdas_, embedding_, std::move(inc));
}

WienerPath WienerPath::with_increments(RealRowMatrix increments) const {
    return WienerPath(grid_, lambdas_, embedding_, std::move(increments));
}

WienerPath WienerPath::with_embedding(RealRowMatrix embedding) const {
    return WienerPath(grid_, lambdas_, std::move(embedding), increments_);
}

WienerPath WienerPath::with_grid(const TimeGrid& grid) const {
    if (!grid.same_axis(grid_)) {
        throw ShapeError("WienerPath::with_grid: time axis differs");
    }
    return WienerPath(grid, lambdas_, embedding_, increments_);
}

Trajectory ito_integral(const std::vector<Trajectory>& z, const WienerPath& path) {
    if (z.size() != path.n_modes()) {
        throw ShapeError("ito_integral: expected " + std::to_string(path.n_modes()) + " mode trajectories, got " +
                         std::to_string(z.size()));
    }
    const std::size_t dof = z.front().dof();
    for (const auto& zk : z) {
        if (!zk.grid().same_axis(path.grid())) {
            throw ShapeError("ito_integral: integrand grid differs from path grid");
        }
        if (zk.dof() != dof) {
            throw ShapeError("ito_integral: mode trajectories differ in dof");
        }
    }
    Trajectory out(z.front().grid(), dof);
    const auto& inc = path.increments();
    for (std::size_t n = 1; n < out.n_steps(); ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        out.values().row(row) = out.values().row(row - 1);
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double weight = std::sqrt(path.lambdas()[k]) * inc(row, static_cast<Eigen::Index>(k));
            out.values().row(row) += weight * z[k].values().row(row - 1);
        }
    }
    return out;
}

SigmaSpec SigmaSpec::zero() { return SigmaSpec(); }

SigmaSpec SigmaSpec::affine(double c0, double c1, double declared_lipschitz) {
    if (!std::isfinite(c0) || !std::isfinite(c1)) {
        throw ParameterError("SigmaSpec::affine: coefficients must be finite");
    }
    if (!(declared_lipschitz >= 0.0)) {
        throw ParameterError("SigmaSpec: declared Lipschitz constant must be non-negative");
    }
    SigmaSpec s;
    s.kind_ = Kind::Affine;
    s.c0_ = c0;
    s.c1_ = c1;
    s.declared_ = declared_lipschitz;
    return s;
}

SigmaSpec SigmaSpec::pointwise(Function g, double gain, double declared_lipschitz) {
    if (!std::isfinite(gain)) {
        throw ParameterError("SigmaSpec::pointwise: gain must be finite");
    }
    if (!(declared_lipschitz >= 0.0)) {
        throw ParameterError("SigmaSpec: declared Lipschitz constant must be non-negative");
    }
    SigmaSpec s;
    s.kind_ = Kind::Pointwise;
    s.function_ = g;
    s.gain_ = gain;
    s.declared_ = declared_lipschitz;
    return s;
}

SigmaSpec::Function SigmaSpec::parse_function(const std::string& name) {
    if (name == "identity") {
        return Function::Identity;
    }
    if (name == "sin") {
        return Function::Sin;
    }
    if (name == "clipped_linear") {
        return Function::ClippedLinear;
    }
    throw ParameterError("unknown sigma function '" + name + "' (expected identity, sin or clipped_linear)");
}

std::string SigmaSpec::to_string(Function g) {
    switch (g) {
    case Function::Identity:
        return "identity";
    case Function::Sin:
        return "sin";
    case Function::ClippedLinear:
        return "clipped_linear";
    }
    return "identity";
}

void SigmaSpec::shape_inplace(Eigen::Ref<CVector> x) const {
    switch (kind_) {
    case Kind::Zero:
        x.setZero();
        return;
    case Kind::Affine:
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x(i) = c0_ + c1_ * x(i);
        }
        return;
    case Kind::Pointwise:
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double re = x(i).real();
            const double im = x(i).imag();
            switch (function_) {
            case Function::Identity:
                x(i) = gain_ * x(i);
                break;
            case Function::Sin:
                x(i) = Complex{gain_ * std::sin(re), im == 0.0 ? 0.0 : gain_ * std::sin(im)};
                break;
            case Function::ClippedLinear:
                x(i) = Complex{gain_ * clip(re), gain_ * clip(im)};
                break;
            }
        }
        return;
    }
}

CVector SigmaSpec::shape(const CVector& x) const {
    CVector out = x;
    shape_inplace(out);
    return out;
}

double SigmaSpec::lipschitz_bound(const std::vector<double>& lambdas, const RealRowMatrix& embedding) const {
    if (kind_ == Kind::Zero) {
        return 0.0;
    }
    if (static_cast<std::size_t>(embedding.rows()) != lambdas.size()) {
        throw ShapeError("SigmaSpec: embedding rows differ from number of modes");
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < embedding.cols(); ++i) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < embedding.rows(); ++k) {
            acc += lambdas[static_cast<std::size_t>(k)] * embedding(k, i) * embedding(k, i);
        }
        worst = std::max(worst, acc);
    }
    const double slope = kind_ == Kind::Affine ? std::abs(c1_) : std::abs(gain_);
    return slope * std::sqrt(worst);
}

void SigmaSpec::check_declared(const std::vector<double>& lambdas, const RealRowMatrix& embedding) const {
    const double bound = lipschitz_bound(lambdas, embedding);
    if (declared_ < bound * (1.0 - 1e-12)) {
        throw ParameterError("SigmaSpec: declared Lipschitz constant " + std::to_string(declared_) +
                             " is below the computed bound " + std::to_string(bound));
    }
}

double SigmaSpec::l2_norm_squared(const CVector& x, const std::vector<double>& lambdas,
                                  const RealRowMatrix& embedding) const {
    const CVector s = shape(x);
    double total = 0.0;
    for (Eigen::Index k = 0; k < embedding.rows(); ++k) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < embedding.cols(); ++i) {
            acc += std::norm(embedding(k, i) * s(i));
        }
        total += lambdas[static_cast<std::size_t>(k)] * acc;
    }
    return total;
}

Trajectory stochastic_integral(const SigmaSpec& sigma, const Trajectory& u, const WienerPath& path) {
    if (!u.grid().same_axis(path.grid())) {
        throw ShapeError("stochastic_integral: trajectory grid differs from path grid");
    }
    if (u.dof() != path.dof()) {
        throw ShapeError("stochastic_integral: trajectory dof " + std::to_string(u.dof()) +
                         " differs from embedding dof " + std::to_string(path.dof()));
    }
    Trajectory out(u.grid(), u.dof());
    if (sigma.is_zero()) {
        return out;
    }
    const RealRowMatrix& xi = path.field_increments();
    CVector s(static_cast<Eigen::Index>(u.dof()));
    for (std::size_t n = 1; n < out.n_steps(); ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        s = u.values().row(row - 1).transpose();
        sigma.shape_inplace(s);
        out.values().row(row) = out.values().row(row - 1) + s.transpose().cwiseProduct(xi.row(row).cast<Complex>());
    }
    return out;
}

AdditiveKind parse_additive_kind(const std::string& name) {
    if (name == "wiener") {
        return AdditiveKind::Wiener;
    }
    if (name == "compound_poisson") {
        return AdditiveKind::CompoundPoisson;
    }
    if (name == "fbm") {
        return AdditiveKind::FractionalBrownian;
    }
    throw ParameterError("unknown additive path '" + name + "' (expected wiener, compound_poisson or fbm)");
}

std::string to_string(AdditiveKind kind) {
    switch (kind) {
    case AdditiveKind::Wiener:
        return "wiener";
    case AdditiveKind::CompoundPoisson:
        return "compound_poisson";
    case AdditiveKind::FractionalBrownian:
        return "fbm";
    }
    return "wiener";
}

Trajectory sample_additive(AdditiveKind kind, const TimeGrid& grid, const std::vector<double>& lambdas,
                           const RealRowMatrix& embedding, std::uint64_t seed, const AdditiveParams& params) {
    check_lambdas(lambdas);
    if (static_cast<std::size_t>(embedding.rows()) != lambdas.size()) {
        throw ShapeError("sample_additive: embedding rows differ from number of modes");
    }
    const auto n = static_cast<Eigen::Index>(grid.n_steps());
    const auto k_modes = static_cast<Eigen::Index>(lambdas.size());
    // Scalar processes per mode, as cumulative values X_k(t_n) with X_k(t_0) = 0.
    RealRowMatrix scalar = RealRowMatrix::Zero(n, k_modes);
    switch (kind) {
    case AdditiveKind::Wiener: {
        const WienerPath path = WienerPath::sample(grid, lambdas, RealRowMatrix(k_modes, 0), seed);
        scalar = path.values();
        break;
    }
    case AdditiveKind::CompoundPoisson: {
        if (!(params.jump_rate > 0.0) || !(params.jump_scale > 0.0)) {
            throw ParameterError("sample_additive: jump rate and scale must be positive");
        }
        std::mt19937_64 rng = make_rng(seed);
        std::poisson_distribution<int> count(params.jump_rate * grid.dt());
        std::normal_distribution<double> jump(0.0, params.jump_scale);
        for (Eigen::Index i = 1; i < n; ++i) {
            for (Eigen::Index k = 0; k < k_modes; ++k) {
                double acc = 0.0;
                for (int j = count(rng); j > 0; --j) {
                    acc += jump(rng);
                }
                scalar(i, k) = scalar(i - 1, k) + acc;
            }
        }
        break;
    }
    case AdditiveKind::FractionalBrownian: {
        const double hurst = params.hurst;
        if (!(hurst > 0.0 && hurst < 1.0)) {
            throw ParameterError("sample_additive: Hurst index must lie in (0, 1)");
        }
        // Hosking's recursion for fractional Gaussian noise with unit-step
        // covariance, rescaled by dt^H.
        const Eigen::Index m = n - 1;
        std::vector<double> gamma(static_cast<std::size_t>(std::max<Eigen::Index>(m, 1)));
        for (std::size_t j = 0; j < gamma.size(); ++j) {
            const auto jd = static_cast<double>(j);
            gamma[j] = 0.5 * (std::pow(jd + 1.0, 2 * hurst) - 2.0 * std::pow(jd, 2 * hurst) +
                              std::pow(std::abs(jd - 1.0), 2 * hurst));
        }
        std::mt19937_64 rng = make_rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double scale = std::pow(grid.dt(), hurst);
        for (Eigen::Index k = 0; k < k_modes; ++k) {
            std::vector<double> x(static_cast<std::size_t>(m));
            std::vector<double> phi;
            std::vector<double> prev;
            double var = 1.0;
            for (Eigen::Index t = 0; t < m; ++t) {
                const auto ts = static_cast<std::size_t>(t);
                if (t > 0) {
                    double num = gamma[ts];
                    for (std::size_t j = 0; j < prev.size(); ++j) {
                        num -= prev[j] * gamma[ts - 1 - j];
                    }
                    const double kappa = num / var;
                    phi.assign(ts, 0.0);
                    for (std::size_t j = 0; j + 1 < ts; ++j) {
                        phi[j] = prev[j] - kappa * prev[ts - 2 - j];
                    }
                    phi[ts - 1] = kappa;
                    var *= (1.0 - kappa * kappa);
                    prev = phi;
                }
                double mean = 0.0;
                for (std::size_t j = 0; j < prev.size(); ++j) {
                    mean += prev[j] * x[ts - 1 - j];
                }
                x[ts] = mean + std::sqrt(var) * normal(rng);
            }
            for (Eigen::Index t = 1; t < n; ++t) {
                scalar(t, k) = scalar(t - 1, k) + scale * x[static_cast<std::size_t>(t - 1)];
            }
        }
        break;
    }
    }
    for (Eigen::Index k = 0; k < k_modes; ++k) {
        scalar.col(k) *= std::sqrt(lambdas[static_cast<std::size_t>(k)]);
    }
    const RealRowMatrix mixed = scalar * embedding;
    return Trajectory(grid, RowMatrix(mixed.cast<Complex>()));
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

IsometryReport verify_ito_isometry(const IntegrandGenerator& zgen, const TimeGrid& grid,
                                   const std::vector<double>& lambdas, std::size_t dof, std::size_t n_paths,
                                   std::uint64_t seed, unsigned threads) {
    if (n_paths < 2) {
        throw ParameterError("verify_ito_isometry: need at least 2 paths");
    }
    const double nu = grid.nu();
    std::vector<double> lhs(n_paths);
    std::vector<double> rhs(n_paths);
    const RealRowMatrix embedding = RealRowMatrix::Zero(static_cast<Eigen::Index>(lambdas.size()),
                                                        static_cast<Eigen::Index>(dof));
    parallel_for(n_paths, threads, [&](std::size_t p) {
        const WienerPath path = WienerPath::sample(grid, lambdas, embedding, seed, p);
        const std::vector<Trajectory> z = zgen(path, p);
        const Trajectory integral = ito_integral(z, path);
        const double l = weighted_norm(integral, nu);
        double r = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double nk = weighted_norm(z[k], nu);
            r += lambdas[k] * nk * nk;
        }
        lhs[p] = l * l;
        rhs[p] = r / (2.0 * nu);
    });

    IsometryReport rep;
    rep.n_paths = n_paths;
    const auto np = static_cast<double>(n_paths);
    double sl = 0.0;
    double sr = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        sl += lhs[p];
        sr += rhs[p];
    }
    rep.lhs_mean = sl / np;
    rep.rhs_mean = sr / np;
    double vl = 0.0;
    double vr = 0.0;
    double cov = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        const double dl = lhs[p] - rep.lhs_mean;
        const double dr = rhs[p] - rep.rhs_mean;
        vl += dl * dl;
        vr += dr * dr;
        cov += dl * dr;
    }
    vl /= np - 1.0;
    vr /= np - 1.0;
    cov /= np - 1.0;
    if (rep.rhs_mean > 0.0) {
        rep.ratio = rep.lhs_mean / rep.rhs_mean;
        const double m2 = rep.rhs_mean * rep.rhs_mean;
        const double var_ratio =
            (vl / m2 - 2.0 * rep.lhs_mean * cov / (m2 * rep.rhs_mean) + rep.lhs_mean * rep.lhs_mean * vr / (m2 * m2)) /
            np;
        rep.standard_error = std::sqrt(std::max(var_ratio, 0.0));
    } else {
        rep.ratio = rep.lhs_mean == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    const double q = std::exp(-2.0 * nu * grid.dt());
    rep.discretization_bias = 2.0 * nu * grid.dt() * q / (1.0 - q);
    return rep;
}

} // namespace evo
