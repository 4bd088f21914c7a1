#include "seislabel/curvelet.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace seislabel {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Smooth Meyer step: 0 at 0, 1 at 1, C^3 at both ends.
double meyer_nu(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

int centered(int a, int n) { return a <= (n - 1) / 2 ? a : a - n; }

}  // namespace

int num_scales(int n1, int n2) {
    int m = std::min(n1, n2);
    if (m < 16) {
        std::ostringstream os;
        os << "unsupported patch size " << n1 << "x" << n2
           << ": minimum dimension must be >= 16";
        throw DataError(os.str());
    }
    return static_cast<int>(std::ceil(std::log2(static_cast<double>(m)) - 3.0));
}

int num_orientations(int j) {
    if (j < 0) throw ConfigError("num_orientations: negative scale index");
    if (j == 0) return 1;
    int e = (j - 1 + 1) / 2;  // ceil((j-1)/2)
    return 16 * (1 << e);
}

FrequencyTiling::FrequencyTiling(int n1, int n2) : n1_(n1), n2_(n2) {
    J_ = num_scales(n1, n2);
    orientations_.resize(J_);
    for (int s = 0; s < J_; ++s) orientations_[s] = num_orientations(s);

    // Radial breakpoints: ramp s rises over (a[s-1], a[s]); a[J-1] = 1.
    std::vector<double> a(J_);
    for (int s = 0; s < J_; ++s) a[s] = std::pow(2.0, s - (J_ - 1));

    // Pseudo-radius in max norm so coronae are concentric squares filling the
    // grid exactly; rho = 1 on the outer boundary of the frequency box.
    auto rho_of = [&](int k1, int k2) {
        return std::max(std::abs(2.0 * k1 / n1_), std::abs(2.0 * k2 / n2_));
    };
    auto ramp = [&](int s, double rho) {  // r_s, with r_0 = 1 and r_J = 0
        if (s <= 0) return 1.0;
        if (s >= J_) return 0.0;
        double lo = a[s - 1], hi = a[s];
        return std::sin(kPi / 2.0 * meyer_nu((rho - lo) / (hi - lo)));
    };

    for (int s = 0; s < J_; ++s) {
        int K = orientations_[s];
        std::vector<Eigen::ArrayXXd> raw(K, Eigen::ArrayXXd::Zero(n1_, n2_));

        for (int a1 = 0; a1 < n1_; ++a1) {
            for (int a2 = 0; a2 < n2_; ++a2) {
                int k1 = centered(a1, n1_), k2 = centered(a2, n2_);
                double rho = rho_of(k1, k2);
                double rs = ramp(s, rho), rn = ramp(s + 1, rho);
                double R = std::sqrt(std::max(rs * rs - rn * rn, 0.0));
                if (R == 0.0) continue;
                if (K == 1) {
                    raw[0](a1, a2) = R;
                    continue;
                }
                // Angular profile: wedge l rises over sector l and falls over
                // sector l+1 of width delta, so each bin splits between
                // exactly two wedges and the squared windows telescope to 1.
                double theta = std::atan2(2.0 * k1 / n1_, 2.0 * k2 / n2_);
                double delta = 2.0 * kPi / K;
                double x = (theta + kPi / 2.0) / delta;
                x = std::fmod(x, static_cast<double>(K));
                if (x < 0.0) x += K;
                if (x >= K) x -= K;
                int t = static_cast<int>(std::floor(x));
                double frac = x - t;
                double nu = meyer_nu(frac);
                raw[t % K](a1, a2) += R * std::sin(kPi / 2.0 * nu);
                raw[(t + K - 1) % K](a1, a2) += R * std::cos(kPi / 2.0 * nu);
            }
        }

        // Enforce exact conjugate symmetry between mirror wedges: the window
        // of wedge l+K/2 at the modular mirror bin is defined to equal the
        // window of wedge l at the canonical bin.  This keeps mirror-wedge
        // energies exactly paired for real inputs, including the Nyquist
        // row/column of even-sized grids where the modular mirror folds onto
        // the same row; the per-bin sum of squared windows is unchanged.
        if (K > 1) {
            std::vector<Eigen::ArrayXXd> fixed = raw;
            for (int a1 = 0; a1 < n1_; ++a1) {
                for (int a2 = 0; a2 < n2_; ++a2) {
                    int m1 = (n1_ - a1) % n1_, m2 = (n2_ - a2) % n2_;
                    if (m1 == a1 && m2 == a2) {
                        for (int l = 0; l < K / 2; ++l) {
                            double v = std::sqrt((raw[l](a1, a2) * raw[l](a1, a2) +
                                                  raw[l + K / 2](a1, a2) * raw[l + K / 2](a1, a2)) /
                                                 2.0);
                            fixed[l](a1, a2) = v;
                            fixed[l + K / 2](a1, a2) = v;
                        }
                    } else if (std::make_pair(a1, a2) < std::make_pair(m1, m2)) {
                        for (int l = 0; l < K; ++l)
                            fixed[(l + K / 2) % K](m1, m2) = raw[l](a1, a2);
                    }
                }
            }
            raw.swap(fixed);
        }

        for (int l = 0; l < K; ++l) {
            // bounding box of the support in centered coordinates
            int rmin = n1_, rmax = -n1_, cmin = n2_, cmax = -n2_;
            for (int a1 = 0; a1 < n1_; ++a1)
                for (int a2 = 0; a2 < n2_; ++a2) {
                    if (raw[l](a1, a2) == 0.0) continue;
                    int k1 = centered(a1, n1_), k2 = centered(a2, n2_);
                    rmin = std::min(rmin, k1);
                    rmax = std::max(rmax, k1);
                    cmin = std::min(cmin, k2);
                    cmax = std::max(cmax, k2);
                }
            Wedge w;
            w.scale = s;
            w.orientation = l;
            if (rmin > rmax) {  // empty support: keep a degenerate zero window
                w.row0 = 0;
                w.col0 = 0;
                w.win = Eigen::ArrayXXd::Zero(1, 1);
            } else {
                w.row0 = rmin;
                w.col0 = cmin;
                w.win.resize(rmax - rmin + 1, cmax - cmin + 1);
                for (int i = 0; i <= rmax - rmin; ++i)
                    for (int j = 0; j <= cmax - cmin; ++j) {
                        int a1 = ((rmin + i) % n1_ + n1_) % n1_;
                        int a2 = ((cmin + j) % n2_ + n2_) % n2_;
                        w.win(i, j) = raw[l](a1, a2);
                    }
            }
            wedges_.push_back(std::move(w));
        }
    }
}

bool FrequencyTiling::retained(std::size_t wedge_index) const {
    const Wedge& w = wedges_.at(wedge_index);
    if (w.scale == 0) return true;
    return w.orientation < orientations_[w.scale] / 2;
}

int FrequencyTiling::retained_count() const {
    int n = 0;
    for (std::size_t i = 0; i < wedges_.size(); ++i)
        if (retained(i)) ++n;
    return n;
}

double FrequencyTiling::window_energy_at(int k1, int k2) const {
    double sum = 0.0;
    for (const Wedge& w : wedges_) {
        int i = k1 - w.row0, j = k2 - w.col0;
        if (i < 0 || i >= w.win.rows() || j < 0 || j >= w.win.cols()) continue;
        sum += w.win(i, j) * w.win(i, j);
    }
    return sum;
}

double CurveletCoeffs::total_energy() const {
    double total = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        double e = coeffs[i].squaredNorm();
        total += geometry->wedges()[wedge_index[i]].scale == 0 ? e : 2.0 * e;
    }
    return total;
}

// ---- forward transform ------------------------------------------------------

struct CurveletTransform::Impl {
    int n1, n2;
    fftw_complex* in = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;

    struct InversePlan {
        fftw_complex* in = nullptr;
        fftw_complex* out = nullptr;
        fftw_plan plan = nullptr;
    };
    std::map<std::pair<int, int>, InversePlan> inverse;

    Impl(int rows, int cols, const FrequencyTiling& tiling) : n1(rows), n2(cols) {
        in = fftw_alloc_complex(static_cast<std::size_t>(n1) * n2);
        spec = fftw_alloc_complex(static_cast<std::size_t>(n1) * n2);
        fwd = fftw_plan_dft_2d(n1, n2, in, spec, FFTW_FORWARD, FFTW_ESTIMATE);
        for (std::size_t i = 0; i < tiling.wedges().size(); ++i) {
            if (!tiling.retained(i)) continue;
            const Wedge& w = tiling.wedges()[i];
            auto key = std::make_pair(static_cast<int>(w.win.rows()),
                                      static_cast<int>(w.win.cols()));
            if (inverse.count(key)) continue;
            InversePlan p;
            p.in = fftw_alloc_complex(static_cast<std::size_t>(key.first) * key.second);
            p.out = fftw_alloc_complex(static_cast<std::size_t>(key.first) * key.second);
            p.plan = fftw_plan_dft_2d(key.first, key.second, p.in, p.out,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
            inverse.emplace(key, p);
        }
    }

    ~Impl() {
        fftw_destroy_plan(fwd);
        for (auto& [key, p] : inverse) {
            fftw_destroy_plan(p.plan);
            fftw_free(p.in);
            fftw_free(p.out);
        }
        fftw_free(in);
        fftw_free(spec);
    }
};

CurveletTransform::CurveletTransform(int n1, int n2)
    : tiling_(std::make_shared<FrequencyTiling>(n1, n2)),
      impl_(std::make_unique<Impl>(n1, n2, *tiling_)) {}

CurveletTransform::~CurveletTransform() = default;

CurveletCoeffs CurveletTransform::forward(const Patch& patch) {
    patch.validate();
    return forward(patch.pixels);
}

CurveletCoeffs CurveletTransform::forward(const PatchImage& pixels) {
    int n1 = impl_->n1, n2 = impl_->n2;
    if (pixels.rows() != n1 || pixels.cols() != n2) {
        std::ostringstream os;
        os << "forward transform: patch is " << pixels.cols() << "x" << pixels.rows()
           << " but the tiling was built for " << n2 << "x" << n1;
        throw DataError(os.str());
    }

    for (int r = 0; r < n1; ++r)
        for (int c = 0; c < n2; ++c) {
            impl_->in[static_cast<std::size_t>(r) * n2 + c][0] = pixels(r, c);
            impl_->in[static_cast<std::size_t>(r) * n2 + c][1] = 0.0;
        }
    fftw_execute(impl_->fwd);
    double fwd_scale = 1.0 / std::sqrt(static_cast<double>(n1) * n2);

    CurveletCoeffs out;
    out.geometry = tiling_;
    const auto& wedges = tiling_->wedges();
    for (std::size_t i = 0; i < wedges.size(); ++i) {
        if (!tiling_->retained(i)) continue;
        const Wedge& w = wedges[i];
        int p = static_cast<int>(w.win.rows()), q = static_cast<int>(w.win.cols());
        auto& ip = impl_->inverse.at({p, q});

        for (int r = 0; r < p; ++r)
            for (int c = 0; c < q; ++c) {
                int a1 = ((w.row0 + r) % n1 + n1) % n1;
                int a2 = ((w.col0 + c) % n2 + n2) % n2;
                const fftw_complex& s = impl_->spec[static_cast<std::size_t>(a1) * n2 + a2];
                double win = w.win(r, c) * fwd_scale;
                ip.in[static_cast<std::size_t>(r) * q + c][0] = win * s[0];
                ip.in[static_cast<std::size_t>(r) * q + c][1] = win * s[1];
            }
        fftw_execute(ip.plan);

        double inv_scale = 1.0 / std::sqrt(static_cast<double>(p) * q);
        Eigen::MatrixXcd coef(p, q);
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < q; ++c) {
                const fftw_complex& v = ip.out[static_cast<std::size_t>(r) * q + c];
                coef(r, c) = std::complex<double>(v[0] * inv_scale, v[1] * inv_scale);
            }
        out.wedge_index.push_back(i);
        out.coeffs.push_back(std::move(coef));
    }
    return out;
}

}  // namespace seislabel
