#include "wigkit/steering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace wigkit {

namespace {

constexpr double four_pi = 4.0 * M_PI;
constexpr double reid_tol = 1e-9;

int even_points(int n) {
    n = std::max(n, 16);
    return n % 2 ? n + 1 : n;
}

PhasePoint scalar_point(double v) {
    PhasePoint p(1);
    p[0] = v;
    return p;
}

void require_single_mode_parties(const JointState& joint, const char* who) {
    if (joint.layout().alice_modes != 1 || joint.layout().bob_modes != 1)
        throw std::invalid_argument(std::string(who) +
                                    ": single-mode parties required for axis slices");
}

// Projected second-order data of a Gaussian state along (g, f).
struct ProjectedGaussian {
    double saa, sbb, sab, mean_a, mean_b;
};

ProjectedGaussian project_gaussian(const GaussianState& s, const Eigen::Vector2d& g,
                                   const Eigen::Vector2d& f) {
    ProjectedGaussian p;
    p.saa = g.dot(s.alice_cov() * g);
    p.sbb = f.dot(s.bob_cov() * f);
    p.sab = g.dot(s.cross_cov() * f);
    p.mean_a = g.dot(s.alice_mean());
    p.mean_b = f.dot(s.bob_mean());
    return p;
}

// Joint density table for the pair (q_a = g.x_A, q_b = f.x_B) on 1D lattices.
struct PairTable {
    PhaseGrid ga;
    PhaseGrid gb;
    Eigen::MatrixXd j;  // (ga points, gb points)
};

// M_n(q) = integral over the conjugate coordinate of W_n, evaluated at the
// given unit-direction coordinates. Column n holds level n.
Eigen::MatrixXd fock_level_marginals(int cutoff, const Eigen::VectorXd& qcoords) {
    const double p_hw = std::sqrt(2.0 * (2 * cutoff + 1)) + 8.0;
    const int np = 1024;
    PhaseGrid plat(1, p_hw, np, PhasePoint::Zero(1));
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(qcoords.size(), cutoff + 1);
    std::vector<double> w(cutoff + 1);
    for (int i = 0; i < qcoords.size(); ++i) {
        const double q2 = qcoords[i] * qcoords[i];
        for (int k = 0; k < np; ++k) {
            const double p = plat.axis_coord(0, k);
            fock_wigner_all_radial(cutoff, q2 + p * p, w);
            for (int n = 0; n <= cutoff; ++n) out(i, n) += w[n];
        }
    }
    return out * plat.step();
}

PairTable build_pair_table(const JointState& joint, const Eigen::Vector2d& g,
                           const Eigen::Vector2d& f, const SliceSpec& spec) {
    const double gn = g.norm(), fn = f.norm();
    if (gn < 1e-12 || fn < 1e-12)
        throw std::invalid_argument("slice axes must be nonzero");
    const int n = even_points(spec.points);

    if (const FockMixtureState* m = joint.fock_mixture()) {
        const double sig = std::sqrt(m->marginal_variance());
        const double hwa = spec.half_width > 0 ? spec.half_width : 6.0 * sig * gn;
        const double hwb = spec.half_width > 0 ? spec.half_width : 6.0 * sig * fn;
        PairTable t{PhaseGrid(1, hwa, n, PhasePoint::Zero(1)),
                    PhaseGrid(1, hwb, n, PhasePoint::Zero(1)), {}};
        Eigen::VectorXd qa(n), qb(n);
        for (int i = 0; i < n; ++i) {
            qa[i] = t.ga.axis_coord(0, i) / gn;
            qb[i] = t.gb.axis_coord(0, i) / fn;
        }
        const int cut = m->cutoff();
        const Eigen::MatrixXd Ma = fock_level_marginals(cut, qa);
        const Eigen::MatrixXd Mb = fock_level_marginals(cut, qb);
        Eigen::VectorXd p(cut + 1);
        for (int k = 0; k <= cut; ++k) p[k] = m->weight(k);
        t.j = Ma * p.asDiagonal() * Mb.transpose() / (gn * fn);
        return t;
    }

    const WignerField* fj = joint.grid();
    if (!fj)
        throw std::logic_error("build_pair_table: analytic Gaussian states use closed forms");

    // Canonical-axis fast path: the table is a marginal of the stored grid.
    auto canonical = [](const Eigen::Vector2d& v, int& axis) {
        for (int a = 0; a < 2; ++a) {
            Eigen::Vector2d e = Eigen::Vector2d::Zero();
            e[a] = 1.0;
            if ((v - e).norm() < 1e-12) {
                axis = a;
                return true;
            }
        }
        return false;
    };
    int ag = 0, af = 0;
    if (canonical(g, ag) && canonical(f, af)) {
        const std::array<int, 2> kept{ag, 2 + af};
        WignerField mg = marginal(*fj, std::span<const int>(kept.data(), 2));
        const int np = mg.grid.points_per_axis();
        PairTable t{PhaseGrid(1, mg.grid.half_width(), np,
                              scalar_point(mg.grid.center()[0])),
                    PhaseGrid(1, mg.grid.half_width(), np,
                              scalar_point(mg.grid.center()[1])),
                    Eigen::MatrixXd(np, np)};
        for (int ia = 0; ia < np; ++ia)
            for (int ib = 0; ib < np; ++ib)
                t.j(ia, ib) = mg.values[static_cast<std::size_t>(ia) * np + ib];
        return t;
    }

    // General directions: quadrature over both conjugate coordinates through
    // the interpolated grid. Heavier than the fast path by construction.
    const Eigen::Vector2d gu = g / gn, fu = f / fn;
    const Eigen::Vector2d gc = conjugate_axis(gu), fc = conjugate_axis(fu);
    const Eigen::Vector2d cA(fj->grid.center()[0], fj->grid.center()[1]);
    const Eigen::Vector2d cB(fj->grid.center()[2], fj->grid.center()[3]);
    const double span = fj->grid.half_width() * std::numbers::sqrt2;
    const int no = std::min(n, 128);
    const double hwa = spec.half_width > 0 ? spec.half_width : gn * span;
    const double hwb = spec.half_width > 0 ? spec.half_width : fn * span;
    PairTable t{PhaseGrid(1, hwa, no, scalar_point(g.dot(cA))),
                PhaseGrid(1, hwb, no, scalar_point(f.dot(cB))),
                Eigen::MatrixXd::Zero(no, no)};
    const int ni = 64;
    PhaseGrid gs(1, span, ni, scalar_point(gc.dot(cA)));
    PhaseGrid gt(1, span, ni, scalar_point(fc.dot(cB)));
    PhasePoint x(4);
    for (int ia = 0; ia < no; ++ia) {
        const double qa = t.ga.axis_coord(0, ia) / gn;
        for (int ib = 0; ib < no; ++ib) {
            const double qb = t.gb.axis_coord(0, ib) / fn;
            double acc = 0.0;
            for (int is = 0; is < ni; ++is) {
                const double sv = gs.axis_coord(0, is);
                const Eigen::Vector2d xa = qa * gu + sv * gc;
                x[0] = xa[0];
                x[1] = xa[1];
                for (int it = 0; it < ni; ++it) {
                    const double tv = gt.axis_coord(0, it);
                    const Eigen::Vector2d xb = qb * fu + tv * fc;
                    x[2] = xb[0];
                    x[3] = xb[1];
                    acc += fj->interpolate(x);
                }
            }
            t.j(ia, ib) = acc * gs.step() * gt.step() / (gn * fn);
        }
    }
    return t;
}

struct SliceStats {
    double mass;  // column sum times the b-axis step
    double mean;
    double var;
};

SliceStats column_stats(const PairTable& t, int ia) {
    const int nb = t.gb.points_per_axis();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int ib = 0; ib < nb; ++ib) {
        const double v = t.j(ia, ib);
        const double c = t.gb.axis_coord(0, ib);
        s0 += v;
        s1 += v * c;
        s2 += v * c * c;
    }
    SliceStats out;
    out.mass = s0 * t.gb.step();
    if (s0 == 0.0) {
        out.mean = 0.0;
        out.var = 0.0;
        return out;
    }
    out.mean = s1 / s0;
    out.var = s2 / s0 - out.mean * out.mean;
    return out;
}

double max_column_mass(const PairTable& t) {
    double m = 0.0;
    for (int ia = 0; ia < t.ga.points_per_axis(); ++ia)
        m = std::max(m, std::abs(column_stats(t, ia).mass));
    return m;
}

// Per-slice projected variance scan over the alice nodes of a grid joint.
// Visits every slice with callback(x_alice, mass, var_q, var_p).
template <typename Fn>
void grid_slice_scan(const WignerField& fj, const Eigen::Vector2d& fq,
                     const Eigen::Vector2d& fp, Fn&& callback) {
    const PhaseGrid& g = fj.grid;
    const int n = g.points_per_axis();
    const std::size_t nb = static_cast<std::size_t>(n) * n;
    for (int i0 = 0; i0 < n; ++i0) {
        for (int i1 = 0; i1 < n; ++i1) {
            const std::size_t base = (static_cast<std::size_t>(i0) * n + i1) * nb;
            double s0 = 0.0, q1 = 0.0, q2 = 0.0, p1 = 0.0, p2 = 0.0;
            for (int i2 = 0; i2 < n; ++i2) {
                const double xq = g.axis_coord(2, i2);
                for (int i3 = 0; i3 < n; ++i3) {
                    const double xp = g.axis_coord(3, i3);
                    const double v = fj.values[base + static_cast<std::size_t>(i2) * n + i3];
                    const double cq = fq[0] * xq + fq[1] * xp;
                    const double cp = fp[0] * xq + fp[1] * xp;
                    s0 += v;
                    q1 += v * cq;
                    q2 += v * cq * cq;
                    p1 += v * cp;
                    p2 += v * cp * cp;
                }
            }
            PhasePoint xa(2);
            xa[0] = g.axis_coord(0, i0);
            xa[1] = g.axis_coord(1, i1);
            double vq = 0.0, vp = 0.0;
            if (s0 != 0.0) {
                vq = q2 / s0 - (q1 / s0) * (q1 / s0);
                vp = p2 / s0 - (p1 / s0) * (p1 / s0);
            }
            callback(xa, s0, vq, vp);
        }
    }
}

}  // namespace

Eigen::Vector2d conjugate_axis(const Eigen::Vector2d& g) {
    return Eigen::Vector2d(-g[1], g[0]);
}

double Distribution1D::mass() const { return density.sum() * step; }

double Distribution1D::mean() const {
    const double s0 = density.sum();
    if (s0 == 0.0) return 0.0;
    return points.dot(density) / s0;
}

double Distribution1D::variance() const {
    const double s0 = density.sum();
    if (s0 == 0.0) return 0.0;
    const double m = points.dot(density) / s0;
    double s2 = 0.0;
    for (int i = 0; i < points.size(); ++i)
        s2 += density[i] * points[i] * points[i];
    return s2 / s0 - m * m;
}

Distribution1D conditional_probability(const JointState& joint,
                                       const Eigen::Vector2d& g, double q_alice,
                                       const Eigen::Vector2d& f,
                                       const SliceSpec& spec) {
    require_single_mode_parties(joint, "conditional_probability");
    if (const GaussianState* s = joint.gaussian()) {
        const ProjectedGaussian p = project_gaussian(*s, g, f);
        const double cvar = p.sbb - p.sab * p.sab / p.saa;
        const double cmean = p.mean_b + p.sab / p.saa * (q_alice - p.mean_a);
        const int n = even_points(spec.points);
        const double hw =
            spec.half_width > 0 ? spec.half_width : 6.0 * std::sqrt(std::max(cvar, 1e-6));
        PhaseGrid lat(1, hw, n, scalar_point(cmean));
        Distribution1D out;
        out.points.resize(n);
        out.density.resize(n);
        out.step = lat.step();
        out.conditioned_at = q_alice;
        const double norm = 1.0 / std::sqrt(2.0 * M_PI * cvar);
        for (int i = 0; i < n; ++i) {
            const double x = lat.axis_coord(0, i);
            out.points[i] = x;
            out.density[i] = norm * std::exp(-0.5 * (x - cmean) * (x - cmean) / cvar);
        }
        return out;
    }

    const PairTable t = build_pair_table(joint, g, f, spec);
    const int ia = t.ga.nearest_index(0, q_alice);
    const int nb = t.gb.points_per_axis();
    const double floor = spec.mass_floor_rel * max_column_mass(t);
    const SliceStats st = column_stats(t, ia);
    if (std::abs(st.mass) < floor || st.mass == 0.0)
        throw ConditioningError("conditional_probability: slice mass below floor at q_A = " +
                                std::to_string(t.ga.axis_coord(0, ia)));
    Distribution1D out;
    out.points.resize(nb);
    out.density.resize(nb);
    out.step = t.gb.step();
    out.conditioned_at = t.ga.axis_coord(0, ia);
    for (int ib = 0; ib < nb; ++ib) {
        out.points[ib] = t.gb.axis_coord(0, ib);
        out.density[ib] = t.j(ia, ib) / st.mass;
    }
    return out;
}

double conditional_variance(const JointState& joint, const Eigen::Vector2d& g,
                            const Eigen::Vector2d& f, Quadrature which,
                            const SliceSpec& spec) {
    require_single_mode_parties(joint, "conditional_variance");
    const Eigen::Vector2d gg = which == Quadrature::q ? g : conjugate_axis(g);
    const Eigen::Vector2d ff = which == Quadrature::q ? f : conjugate_axis(f);
    if (const GaussianState* s = joint.gaussian()) {
        const ProjectedGaussian p = project_gaussian(*s, gg, ff);
        return p.sbb - p.sab * p.sab / p.saa;
    }
    const PairTable t = build_pair_table(joint, gg, ff, spec);
    const double floor = spec.mass_floor_rel * max_column_mass(t);
    double num = 0.0, den = 0.0;
    for (int ia = 0; ia < t.ga.points_per_axis(); ++ia) {
        const SliceStats st = column_stats(t, ia);
        if (st.mass <= floor) continue;  // skips negative-mass slices as well
        num += st.mass * st.var;
        den += st.mass;
    }
    if (den <= 0.0)
        throw std::runtime_error("conditional_variance: no slice carries mass");
    return num / den;
}

nlohmann::json ReidReport::to_json() const {
    return {{"var_q", var_q},
            {"var_p", var_p},
            {"product", product},
            {"steering_flag", steering_flag}};
}

ReidReport reid_product(const JointState& joint, const Eigen::Vector2d& g,
                        const Eigen::Vector2d& f, const SliceSpec& spec) {
    ReidReport r;
    r.var_q = conditional_variance(joint, g, f, Quadrature::q, spec);
    r.var_p = conditional_variance(joint, g, f, Quadrature::p, spec);
    r.product = r.var_q * r.var_p;
    r.steering_flag = r.product < 1.0 - reid_tol;
    return r;
}

double avg_conditional_wigner_variance(const JointState& joint,
                                       const Eigen::Vector2d& f, Quadrature which,
                                       const QuadSpec& quad) {
    require_single_mode_parties(joint, "avg_conditional_wigner_variance");
    const Eigen::Vector2d axis = which == Quadrature::q ? f : conjugate_axis(f);

    if (const GaussianState* s = joint.gaussian()) {
        // Schur-complement covariance is conditioning-point independent.
        const Eigen::MatrixXd Sc = schur_complement(*s);
        return axis.dot(Sc * axis);
    }
    if (const FockMixtureState* m = joint.fock_mixture()) {
        // Level mixtures have isotropic conditional moments: the conditional
        // second moment is sum_n c_n(x_A)(2n+1); weighting by the marginal
        // removes the division.
        const int n = even_points(quad.points);
        const PhaseGrid grid = quad.half_width > 0
                                   ? PhaseGrid(2, quad.half_width, n, PhasePoint::Zero(2))
                                   : joint.default_alice_grid(n);
        const int cut = m->cutoff();
        std::vector<double> w(cut + 1);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            fock_wigner_all_radial(cut, grid.point(i).squaredNorm(), w);
            for (int k = 0; k <= cut; ++k) {
                const double pw = m->weight(k) * w[k];
                den += pw;
                num += pw * (2.0 * k + 1.0);
            }
        }
        if (den == 0.0)
            throw std::runtime_error("avg_conditional_wigner_variance: zero marginal mass");
        return axis.squaredNorm() * num / den;
    }

    const WignerField& fj = *joint.grid();
    const Eigen::Vector2d fc = conjugate_axis(axis);
    double max_mass = 0.0;
    grid_slice_scan(fj, axis, fc, [&](const PhasePoint&, double mass, double, double) {
        max_mass = std::max(max_mass, std::abs(mass));
    });
    const double floor = 1e-10 * max_mass;
    double num = 0.0, den = 0.0;
    grid_slice_scan(fj, axis, fc,
                    [&](const PhasePoint&, double mass, double vq, double) {
                        if (mass <= floor) return;
                        num += mass * vq;
                        den += mass;
                    });
    if (den <= 0.0)
        throw std::runtime_error("avg_conditional_wigner_variance: no slice carries mass");
    return num / den;
}

nlohmann::json ChainReport::to_json() const {
    nlohmann::json j{{"var_q_cond", var_q_cond}, {"var_p_cond", var_p_cond},
                     {"product", product},       {"reid_flag", reid_flag},
                     {"var_c_q", var_c_q},       {"var_c_p", var_c_p},
                     {"chain_ok", chain_ok}};
    if (witness_point) {
        nlohmann::json pt = nlohmann::json::array();
        for (int i = 0; i < witness_point->size(); ++i) pt.push_back((*witness_point)[i]);
        j["witness_point"] = pt;
    } else {
        j["witness_point"] = nullptr;
    }
    return j;
}

namespace {

std::optional<PhasePoint> chain_witness_point(const JointState& joint,
                                              const Eigen::Vector2d& f) {
    const Eigen::Vector2d fq = f, fp = conjugate_axis(f);
    if (const GaussianState* s = joint.gaussian()) {
        const Eigen::MatrixXd Sc = schur_complement(*s);
        if (fq.dot(Sc * fq) * fp.dot(Sc * fp) < 1.0) return s->alice_mean();
        return std::nullopt;
    }
    if (const FockMixtureState* m = joint.fock_mixture()) {
        const int cut = m->cutoff();
        std::vector<double> w(cut + 1);
        const double u_max = 2.0 * (2 * cut + 1) + 20.0;
        const int samples = 2048;
        // isotropy: both f and its conjugate see the same variance
        const double scale2 = fq.squaredNorm() * fp.squaredNorm();
        for (int k = 0; k <= samples; ++k) {
            const double u = u_max * k / samples;
            fock_wigner_all_radial(cut, u, w);
            double den = 0.0, num = 0.0;
            for (int n = 0; n <= cut; ++n) {
                const double pw = m->weight(n) * w[n];
                den += pw;
                num += pw * (2.0 * n + 1.0);
            }
            if (std::abs(den) < 1e-12) continue;
            const double v = num / den;
            if (scale2 * v * v < 1.0) {
                PhasePoint xa(2);
                xa[0] = std::sqrt(u);
                xa[1] = 0.0;
                return xa;
            }
        }
        return std::nullopt;
    }
    const WignerField& fj = *joint.grid();
    double max_mass = 0.0;
    grid_slice_scan(fj, fq, fp, [&](const PhasePoint&, double mass, double, double) {
        max_mass = std::max(max_mass, std::abs(mass));
    });
    const double floor = 1e-6 * max_mass;
    std::optional<PhasePoint> found;
    grid_slice_scan(fj, fq, fp,
                    [&](const PhasePoint& xa, double mass, double vq, double vp) {
                        if (found || mass <= floor) return;
                        if (vq * vp < 1.0) found = xa;
                    });
    return found;
}

}  // namespace

ChainReport verify_variance_chain(const JointState& joint, const Eigen::Vector2d& g,
                                  const Eigen::Vector2d& f, double tol) {
    ChainReport r;
    const SliceSpec spec;
    const QuadSpec quad;
    r.var_q_cond = conditional_variance(joint, g, f, Quadrature::q, spec);
    r.var_p_cond = conditional_variance(joint, g, f, Quadrature::p, spec);
    r.product = r.var_q_cond * r.var_p_cond;
    r.reid_flag = r.product < 1.0 - reid_tol;
    r.var_c_q = avg_conditional_wigner_variance(joint, f, Quadrature::q, quad);
    r.var_c_p = avg_conditional_wigner_variance(joint, f, Quadrature::p, quad);
    if (r.var_q_cond < r.var_c_q - tol || r.var_p_cond < r.var_c_p - tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "variance chain violated: homodyne (%.12g, %.12g) vs "
                      "conditional-Wigner (%.12g, %.12g)",
                      r.var_q_cond, r.var_p_cond, r.var_c_q, r.var_c_p);
        throw std::runtime_error(buf);
    }
    r.chain_ok = true;
    if (r.var_c_q * r.var_c_p < 1.0 - reid_tol)
        r.witness_point = chain_witness_point(joint, f);
    return r;
}

std::vector<Assemblage> build_assemblage(const JointState& joint,
                                         const PovmFamily& family,
                                         const PhaseGrid& alice_quad,
                                         const PhaseGrid& bob_grid) {
    if (alice_quad.dim() != joint.layout().alice_dim())
        throw std::invalid_argument("build_assemblage: alice grid dimension mismatch");
    if (bob_grid.dim() != joint.layout().bob_dim())
        throw std::invalid_argument("build_assemblage: bob grid dimension mismatch");
    if (family.modes != joint.layout().alice_modes)
        throw std::invalid_argument("build_assemblage: family mode count mismatch");

    const double cellA = alice_quad.cell_volume();
    const double scale = std::pow(four_pi, joint.layout().alice_modes);
    const std::size_t na = alice_quad.size();
    const std::size_t nb = bob_grid.size();
    std::vector<Assemblage> out;
    out.reserve(family.elements.size());

    if (const FockMixtureState* m = joint.fock_mixture()) {
        // Separable joint: every assemblage member is a level mixture whose
        // coefficients are alice-side quadratures.
        const int cut = m->cutoff();
        Eigen::MatrixXd La(na, cut + 1), Lb(nb, cut + 1);
        std::vector<double> w(cut + 1);
        for (std::size_t i = 0; i < na; ++i) {
            fock_wigner_all_radial(cut, alice_quad.point(i).squaredNorm(), w);
            for (int n = 0; n <= cut; ++n) La(i, n) = w[n];
        }
        for (std::size_t k = 0; k < nb; ++k) {
            fock_wigner_all_radial(cut, bob_grid.point(k).squaredNorm(), w);
            for (int n = 0; n <= cut; ++n) Lb(k, n) = w[n];
        }
        for (const PovmElement& e : family.elements) {
            Eigen::VectorXd wv(na);
            for (std::size_t i = 0; i < na; ++i) wv[i] = e.wigner(alice_quad.point(i));
            Eigen::VectorXd gamma = La.transpose() * wv * (scale * cellA);
            for (int n = 0; n <= cut; ++n) gamma[n] *= m->weight(n);
            const Eigen::VectorXd vals = Lb * gamma;
            WignerField field(bob_grid);
            for (std::size_t k = 0; k < nb; ++k) field.values[k] = vals[k];
            out.push_back({e.label, e.outcome_weight, std::move(field)});
        }
        return out;
    }

    if (const GaussianState* gs = joint.gaussian()) {
        const GaussianDensity wa = gs->alice_marginal();
        const Eigen::MatrixXd Sc = schur_complement(*gs);
        const Eigen::MatrixXd Sinv = Sc.inverse();
        const double norm_c = 1.0 / (2.0 * M_PI * std::sqrt(Sc.determinant()));
        const Eigen::MatrixXd K = gs->cross_cov().transpose() * gs->alice_cov().inverse();
        const Eigen::VectorXd xiA = gs->alice_mean();
        const Eigen::VectorXd xiB = gs->bob_mean();
        std::vector<double> waj(na);
        std::vector<Eigen::Vector2d> mus(na);
        for (std::size_t i = 0; i < na; ++i) {
            const PhasePoint a = alice_quad.point(i);
            waj[i] = wa.value(a);
            mus[i] = xiB + K * (a - xiA);
        }
        std::vector<double> bq(nb), bp(nb);
        for (std::size_t k = 0; k < nb; ++k) {
            const PhasePoint b = bob_grid.point(k);
            bq[k] = b[0];
            bp[k] = b[1];
        }
        const double s00 = Sinv(0, 0), s01 = Sinv(0, 1), s11 = Sinv(1, 1);
        for (const PovmElement& e : family.elements) {
            WignerField field(bob_grid);
            std::vector<double> r(na);
            double rmax = 0.0;
            for (std::size_t i = 0; i < na; ++i) {
                r[i] = e.wigner(alice_quad.point(i)) * waj[i] * cellA * scale * norm_c;
                rmax = std::max(rmax, std::abs(r[i]));
            }
            for (std::size_t i = 0; i < na; ++i) {
                if (std::abs(r[i]) < 1e-18 * rmax) continue;
                const double mq = mus[i][0], mp = mus[i][1];
                for (std::size_t k = 0; k < nb; ++k) {
                    const double dq = bq[k] - mq, dp = bp[k] - mp;
                    field.values[k] += r[i] * std::exp(-0.5 * (s00 * dq * dq +
                                                               2.0 * s01 * dq * dp +
                                                               s11 * dp * dp));
                }
            }
            out.push_back({e.label, e.outcome_weight, std::move(field)});
        }
        return out;
    }

    const WignerField& fj = *joint.grid();
    const int ad = joint.layout().alice_dim();
    const int bd = joint.layout().bob_dim();
    PhasePoint x(ad + bd);
    for (const PovmElement& e : family.elements) {
        WignerField field(bob_grid);
        for (std::size_t i = 0; i < na; ++i) {
            const PhasePoint a = alice_quad.point(i);
            const double wv = e.wigner(a) * cellA * scale;
            if (wv == 0.0) continue;
            x.head(ad) = a;
            for (std::size_t k = 0; k < nb; ++k) {
                x.tail(bd) = bob_grid.point(k);
                field.values[k] += wv * fj.interpolate(x);
            }
        }
        out.push_back({e.label, e.outcome_weight, std::move(field)});
    }
    return out;
}

double lhs_reconstruction_check(const JointState& joint, const PovmFamily& family,
                                const PhaseGrid& alice_quad,
                                std::span<const PhasePoint> bob_probes) {
    if (alice_quad.dim() != joint.layout().alice_dim())
        throw std::invalid_argument("lhs_reconstruction_check: alice grid dimension mismatch");
    if (!family.positive_wigner)
        throw std::invalid_argument(
            "lhs_reconstruction_check: family declares negative Wigner elements; "
            "no hidden-state form applies");
    for (const PhasePoint& b : bob_probes)
        if (b.size() != joint.layout().bob_dim())
            throw std::invalid_argument("lhs_reconstruction_check: bad probe dimension");

    const std::size_t na = alice_quad.size();
    const std::size_t np = bob_probes.size();
    const double cellA = alice_quad.cell_volume();
    const double scale = std::pow(four_pi, joint.layout().alice_modes);

    // Route one evaluates the joint directly; route two goes through the
    // marginal-times-conditional factorization.
    Eigen::MatrixXd jointvals(na, np), condvals(na, np);
    Eigen::VectorXd wavals(na);
    const int ad = joint.layout().alice_dim();
    const int bd = joint.layout().bob_dim();
    PhasePoint x(ad + bd);
    for (std::size_t i = 0; i < na; ++i) {
        const PhasePoint a = alice_quad.point(i);
        x.head(ad) = a;
        for (std::size_t p = 0; p < np; ++p) {
            x.tail(bd) = bob_probes[p];
            jointvals(i, p) = joint.wigner(x);
        }
        wavals[i] = joint.alice_marginal(a);
        try {
            const ConditionalWigner cond = conditional_wigner(joint, a);
            for (std::size_t p = 0; p < np; ++p)
                condvals(i, p) = cond.value(bob_probes[p]);
        } catch (const ConditioningError&) {
            // Negligible marginal: the hidden-state route drops the node.
            for (std::size_t p = 0; p < np; ++p) condvals(i, p) = 0.0;
            wavals[i] = 0.0;
        }
    }

    double worst = 0.0;
    Eigen::VectorXd wv(na);
    for (const PovmElement& e : family.elements) {
        for (std::size_t i = 0; i < na; ++i) {
            wv[i] = e.wigner(alice_quad.point(i));
            if (wv[i] < -1e-12)
                throw std::invalid_argument(
                    "lhs_reconstruction_check: element '" + e.label +
                    "' has a negative Wigner value on the quadrature grid");
        }
        for (std::size_t p = 0; p < np; ++p) {
            double r1 = 0.0, r2 = 0.0;
            for (std::size_t i = 0; i < na; ++i) {
                r1 += wv[i] * jointvals(i, p);
                r2 += wv[i] * wavals[i] * condvals(i, p);
            }
            worst = std::max(worst, std::abs(r1 - r2) * cellA * scale);
        }
    }
    return worst;
}

}  // namespace wigkit
