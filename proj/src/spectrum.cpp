#include "pexmap/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "pexmap/errors.hpp"

namespace pexmap {

namespace {

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int cell_index(int n, double x, double y) {
    int ix = static_cast<int>(x * n);
    int iy = static_cast<int>((y + 1.0) * 0.5 * n);
    ix = std::clamp(ix, 0, n - 1);
    iy = std::clamp(iy, 0, n - 1);
    return ix * n + iy;
}

// one CSR left-multiply: out = v P
void left_mult(const UlamOperator& P, const std::vector<double>& v, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    int nc = P.ncells();
    for (int row = 0; row < nc; ++row) {
        double vr = v[row];
        if (vr == 0.0) continue;
        for (int64_t j = P.rowptr[row]; j < P.rowptr[row + 1]; ++j) {
            out[P.col[j]] += vr * P.val[j];
        }
    }
}

double l1_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

}  // namespace

int UlamOperator::cell_of(double x, double y) const { return cell_index(n, x, y); }

UlamOperator build_ulam(const MapModel& map, int n, int s, uint64_t seed) {
    if (n < 2 || s < 1) throw IndexOutOfRange("grid and sampling sizes must be positive");
    UlamOperator P;
    P.n = n;
    P.s = s;
    P.seed = seed;
    P.skeleton = map.skeleton();
    int nc = n * n;
    P.rowptr.assign(nc + 1, 0);

    double inv = 1.0 / (static_cast<double>(s) * s);
    std::vector<int> targets(static_cast<size_t>(s) * s);
    for (int cell = 0; cell < nc; ++cell) {
        int ix = cell / n, iy = cell % n;
        // independent per-cell substream: deterministic and order-free
        std::mt19937_64 rng(splitmix64(seed ^ (0x51ed2701ULL + 2ULL * cell)));
        std::uniform_real_distribution<double> jit(-0.5, 0.5);
        size_t t = 0;
        for (int a = 0; a < s; ++a) {
            for (int b = 0; b < s; ++b) {
                double ux = ((a + 0.5) + jit(rng)) / s;
                double uy = ((b + 0.5) + jit(rng)) / s;
                double x = (ix + ux) / n;
                double y = -1.0 + 2.0 * (iy + uy) / n;
                // boundary-line samples (measure zero up to rounding) self-loop,
                // keeping the row exactly stochastic
                targets[t++] = map.step_d(x, y) ? cell_index(n, x, y) : cell;
            }
        }
        std::sort(targets.begin(), targets.end());
        for (size_t i = 0; i < targets.size();) {
            size_t j = i;
            while (j < targets.size() && targets[j] == targets[i]) ++j;
            P.col.push_back(targets[i]);
            P.val.push_back(static_cast<double>(j - i) * inv);
            i = j;
        }
        P.rowptr[cell + 1] = static_cast<int64_t>(P.col.size());
    }
    return P;
}

SpectralData leading_spectrum(const UlamOperator& P, int count, double tol) {
    if (count < 1 || count > 10) throw IndexOutOfRange("count must lie in [1,10]");
    int nc = P.ncells();
    SpectralData sd;
    sd.n = P.n;

    // stationary left vector by power iteration
    std::vector<double> v(nc, 1.0 / nc), w(nc, 0.0);
    double lam1 = 1.0, resid1 = 1.0;
    int iters = 0;
    const int max_pow = 200000;
    double tight = std::min(tol, 1e-12);
    while (iters < max_pow) {
        left_mult(P, v, w);
        resid1 = 0.0;
        double dot = 0.0, nrm = 0.0;
        for (int i = 0; i < nc; ++i) {
            resid1 += std::fabs(w[i] - v[i]);
            dot += w[i] * v[i];
            nrm += v[i] * v[i];
        }
        lam1 = dot / nrm;
        double s = l1_norm(w);
        for (int i = 0; i < nc; ++i) v[i] = w[i] / s;
        ++iters;
        if (resid1 <= tight) break;
    }
    if (resid1 > tol) throw NoConvergence("stationary vector did not converge", iters);

    sd.density = v;
    double neg = 0.0;
    for (double& x : sd.density) {
        neg = std::min(neg, x);
        if (x < 0.0) x = 0.0;
    }
    if (neg < -1e-10) throw NoConvergence("stationary vector has a negative part", iters);
    double s1 = 0.0;
    for (double x : sd.density) s1 += x;
    for (double& x : sd.density) x /= s1;

    if (count == 1) {
        sd.eigenvalues = {std::complex<double>(lam1, 0.0)};
        sd.residuals = {resid1};
        sd.iterations = iters;
        return sd;
    }

    // deflated block iteration with Schur locking: converged directions are
    // locked as rows of Q with Q P = T Q (T block lower triangular), and the
    // working block iterates in the orthogonal complement, so each pair
    // converges at its own spectral gap instead of the whole-subspace one
    std::vector<std::vector<double>> Q;
    std::vector<std::vector<double>> trows;  // rows of T, lower triangular
    auto lock_row = [&](std::vector<double> q, const std::vector<double>& coupling, double diag) {
        std::vector<double> tr(coupling);
        tr.resize(Q.size() + 1, 0.0);
        tr[Q.size()] = diag;
        trows.push_back(std::move(tr));
        Q.push_back(std::move(q));
    };

    {
        std::vector<double> q1 = sd.density;
        double n2 = 0.0;
        for (double x : q1) n2 += x * x;
        n2 = std::sqrt(n2);
        for (double& x : q1) x /= n2;
        lock_row(std::move(q1), {}, lam1);
    }

    std::mt19937_64 rng(1234577ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto project_q = [&](std::vector<double>& x) {
        for (const auto& q : Q) {
            double d = 0.0;
            for (int t = 0; t < nc; ++t) d += x[t] * q[t];
            for (int t = 0; t < nc; ++t) x[t] -= d * q[t];
        }
    };
    auto normalize2 = [&](std::vector<double>& x) {
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        n2 = std::sqrt(n2);
        if (n2 > 0.0)
            for (double& v : x) v /= n2;
        return n2;
    };
    auto fresh_row = [&]() {
        std::vector<double> x(nc);
        for (double& v : x) v = gauss(rng);
        project_q(x);
        normalize2(x);
        return x;
    };

    std::vector<std::vector<double>> W{fresh_row(), fresh_row()};
    {
        double d = 0.0;
        for (int t = 0; t < nc; ++t) d += W[1][t] * W[0][t];
        for (int t = 0; t < nc; ++t) W[1][t] -= d * W[0][t];
        normalize2(W[1]);
    }

    const double lock_tol = 0.02 * tol;
    const int max_mult = 120000;
    int mult = 0;
    std::vector<double> tmp(nc), pw0(nc), pw1(nc);
    int locked_eigs = 1;
    while (locked_eigs < count && mult < max_mult && static_cast<int>(Q.size()) + 2 <= nc) {
        for (int step = 0; step < 20; ++step) {
            for (auto& w : W) {
                left_mult(P, w, tmp);
                w.swap(tmp);
                ++mult;
                project_q(w);
            }
            normalize2(W[0]);
            double d = 0.0;
            for (int t = 0; t < nc; ++t) d += W[1][t] * W[0][t];
            for (int t = 0; t < nc; ++t) W[1][t] -= d * W[0][t];
            normalize2(W[1]);
        }

        // Rayleigh-Ritz on the deflated 2-block
        left_mult(P, W[0], pw0);
        left_mult(P, W[1], pw1);
        mult += 2;
        std::vector<double> c0(Q.size()), c1(Q.size());
        for (size_t j = 0; j < Q.size(); ++j) {
            double d0 = 0.0, d1 = 0.0;
            for (int t = 0; t < nc; ++t) {
                d0 += pw0[t] * Q[j][t];
                d1 += pw1[t] * Q[j][t];
            }
            c0[j] = d0;
            c1[j] = d1;
            for (int t = 0; t < nc; ++t) {
                pw0[t] -= d0 * Q[j][t];
                pw1[t] -= d1 * Q[j][t];
            }
        }
        double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;
        for (int t = 0; t < nc; ++t) {
            a00 += pw0[t] * W[0][t];
            a01 += pw0[t] * W[1][t];
            a10 += pw1[t] * W[0][t];
            a11 += pw1[t] * W[1][t];
        }

        double tr = a00 + a11, disc = (a00 - a11) * (a00 - a11) + 4.0 * a01 * a10;
        if (disc < 0.0) {
            // conjugate pair: lock both rows once the block residual is small
            double r0 = 0.0, r1 = 0.0;
            for (int t = 0; t < nc; ++t) {
                r0 += std::fabs(pw0[t] - a00 * W[0][t] - a01 * W[1][t]);
                r1 += std::fabs(pw1[t] - a10 * W[0][t] - a11 * W[1][t]);
            }
            if (r0 <= lock_tol && r1 <= lock_tol) {
                std::vector<double> tr0(c0), tr1(c1);
                tr0.resize(Q.size() + 2, 0.0);
                tr1.resize(Q.size() + 2, 0.0);
                tr0[Q.size()] = a00;
                tr0[Q.size() + 1] = a01;
                tr1[Q.size()] = a10;
                tr1[Q.size() + 1] = a11;
                trows.push_back(std::move(tr0));
                trows.push_back(std::move(tr1));
                Q.push_back(W[0]);
                Q.push_back(W[1]);
                locked_eigs += 2;
                W[0] = fresh_row();
                W[1] = fresh_row();
                double d = 0.0;
                for (int t = 0; t < nc; ++t) d += W[1][t] * W[0][t];
                for (int t = 0; t < nc; ++t) W[1][t] -= d * W[0][t];
                normalize2(W[1]);
            }
        } else {
            // two real Ritz values: try to lock the dominant one
            double sq = std::sqrt(disc);
            double la = 0.5 * (tr + sq), lb = 0.5 * (tr - sq);
            if (std::fabs(lb) > std::fabs(la)) std::swap(la, lb);
            // left eigenvector (z0, z1) of the 2x2 block for la
            double z0 = a10, z1 = la - a00;
            if (std::fabs(z0) + std::fabs(z1) < 1e-300) {
                z0 = la - a11;
                z1 = a01;
            }
            double zn = std::hypot(z0, z1);
            z0 /= zn;
            z1 /= zn;
            std::vector<double> y(nc);
            for (int t = 0; t < nc; ++t) y[t] = z0 * W[0][t] + z1 * W[1][t];
            double res = 0.0;
            for (int t = 0; t < nc; ++t)
                res += std::fabs(z0 * pw0[t] + z1 * pw1[t] - la * y[t]);
            if (res <= lock_tol) {
                std::vector<double> cy(Q.size());
                for (size_t j = 0; j < Q.size(); ++j) cy[j] = z0 * c0[j] + z1 * c1[j];
                lock_row(y, cy, la);
                ++locked_eigs;
                // keep the co-Ritz direction as a warm start for the next block
                std::vector<double> w2(nc);
                for (int t = 0; t < nc; ++t) w2[t] = -z1 * W[0][t] + z0 * W[1][t];
                project_q(w2);
                normalize2(w2);
                W[0] = std::move(w2);
                W[1] = fresh_row();
                double d = 0.0;
                for (int t = 0; t < nc; ++t) d += W[1][t] * W[0][t];
                for (int t = 0; t < nc; ++t) W[1][t] -= d * W[0][t];
                normalize2(W[1]);
            }
        }
    }
    if (locked_eigs < count)
        throw NoConvergence("deflated block iteration did not converge", mult);

    // assemble per-pair eigenvectors through the small triangular matrix
    int r = static_cast<int>(Q.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < r; ++i)
        for (size_t j = 0; j < trows[i].size(); ++j) T(i, j) = trows[i][j];
    Eigen::EigenSolver<Eigen::MatrixXd> es(T.transpose());

    std::vector<int> order(r);
    for (int i = 0; i < r; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });

    std::vector<std::complex<double>> eigs;
    std::vector<double> resids;
    std::vector<double> pr(nc), pi(nc);
    for (int idx = 0; idx < count; ++idx) {
        int e = order[idx];
        std::complex<double> lam = es.eigenvalues()[e];
        std::vector<double> wr(nc, 0.0), wi(nc, 0.0);
        for (int i = 0; i < r; ++i) {
            std::complex<double> z = es.eigenvectors()(i, e);
            for (int t = 0; t < nc; ++t) {
                wr[t] += z.real() * Q[i][t];
                wi[t] += z.imag() * Q[i][t];
            }
        }
        double nrm = 0.0;
        for (int t = 0; t < nc; ++t) nrm += std::hypot(wr[t], wi[t]);
        for (int t = 0; t < nc; ++t) {
            wr[t] /= nrm;
            wi[t] /= nrm;
        }
        // explicit residual ||w P - lam w||_1 is the contract, whatever the path
        left_mult(P, wr, pr);
        left_mult(P, wi, pi);
        double res = 0.0;
        for (int t = 0; t < nc; ++t) {
            double re = pr[t] - (lam.real() * wr[t] - lam.imag() * wi[t]);
            double im = pi[t] - (lam.real() * wi[t] + lam.imag() * wr[t]);
            res += std::hypot(re, im);
        }
        if (res > tol)
            throw NoConvergence("assembled eigenpair residual above tolerance", mult);
        eigs.push_back(lam);
        resids.push_back(res);
    }

    // the dominant pair comes from the tighter dedicated iteration
    eigs[0] = std::complex<double>(lam1, 0.0);
    resids[0] = resid1;
    sd.eigenvalues = eigs;
    sd.residuals = resids;
    sd.iterations = iters + mult;
    return sd;
}

SupportInfo acim_supports(const SpectralData& sd, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw IndexOutOfRange("threshold must lie in (0,1]");
    }
    int n = sd.n, nc = n * n;
    SupportInfo info;
    info.threshold = threshold;
    double mx = *std::max_element(sd.density.begin(), sd.density.end());
    info.mask.assign(nc, 0);
    for (int i = 0; i < nc; ++i) info.mask[i] = sd.density[i] >= threshold * mx ? 1 : 0;

    std::vector<char> seen(nc, 0);
    for (int start = 0; start < nc; ++start) {
        if (!info.mask[start] || seen[start]) continue;
        std::vector<int> comp;
        std::deque<int> queue{start};
        seen[start] = 1;
        while (!queue.empty()) {
            int c = queue.front();
            queue.pop_front();
            comp.push_back(c);
            int ix = c / n, iy = c % n;
            const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int jx = ix + dx[d], jy = iy + dy[d];
                if (jx < 0 || jx >= n || jy < 0 || jy >= n) continue;
                int cc = jx * n + jy;
                if (info.mask[cc] && !seen[cc]) {
                    seen[cc] = 1;
                    queue.push_back(cc);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        info.components.push_back(std::move(comp));
    }
    info.q_hat = static_cast<int>(info.components.size());
    return info;
}

HitStats hit_time_stats(const MapModel& map, const SequenceTable& tab, InitialSet init,
                        int m_init, const SupportInfo& support, int grid_n,
                        const std::vector<int64_t>& horizons, int samples, uint64_t seed) {
    if (horizons.empty() || samples < 1) throw IndexOutOfRange("need horizons and samples");
    std::vector<int64_t> hs = horizons;
    std::sort(hs.begin(), hs.end());
    int64_t hmax = hs.back();

    double rl = 0.0, rb = 0.0, rw = 0.0, rh = 0.0;
    if (init == InitialSet::WanderingRectangle) {
        rl = std::exp(tab.logL(0, m_init));
        rb = std::exp(tab.logB(0, m_init));
        rw = std::exp(tab.logW(0, m_init));
        rh = std::exp(tab.logH(0, m_init));
    }

    HitStats st;
    st.samples = samples;
    st.horizon = hmax;
    st.first_hit.assign(samples, -1);

    for (int i = 0; i < samples; ++i) {
        std::mt19937_64 rng(splitmix64(seed ^ (0x7f4a7c15ULL + 2ULL * i)));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double x, y;
        if (init == InitialSet::UniformD) {
            do {
                x = uni(rng);
            } while (x == 0.0);
            do {
                y = 2.0 * uni(rng) - 1.0;
            } while (y == 0.0 || y <= -1.0);
        } else {
            x = rl + uni(rng) * rw;
            y = rb + uni(rng) * rh;
        }
        for (int64_t t = 0; t <= hmax; ++t) {
            if (support.mask[cell_index(grid_n, x, y)]) {
                st.first_hit[i] = t;
                break;
            }
            if (t == hmax || !map.step_d(x, y)) break;
        }
    }

    for (int64_t h : hs) {
        int64_t hits = 0;
        for (int64_t fh : st.first_hit)
            if (fh >= 0 && fh <= h) ++hits;
        st.fraction_by_horizon.emplace_back(h, static_cast<double>(hits) / samples);
    }
    st.hit_fraction = st.fraction_by_horizon.back().second;
    return st;
}

}  // namespace pexmap
