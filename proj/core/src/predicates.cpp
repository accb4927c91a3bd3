#include "ballquad/detail/predicates.hpp"

#include <atomic>
#include <cmath>
#include <vector>

namespace ballquad::detail {
namespace {

std::atomic<unsigned long long> g_orient_exact{0};
std::atomic<unsigned long long> g_sphere_exact{0};

// Expansion arithmetic after Shewchuk: a value is an unevaluated sum of
// non-overlapping doubles stored in increasing magnitude.
class Expansion {
public:
    Expansion() = default;
    explicit Expansion(double v)
    {
        if (v != 0.0) {
            c_.push_back(v);
        }
    }

    static Expansion difference(double a, double b)
    {
        const double x = a - b;
        const double bv = a - x;
        const double av = x + bv;
        const double br = bv - b;
        const double ar = a - av;
        const double y = ar + br;
        Expansion e;
        if (y != 0.0) {
            e.c_.push_back(y);
        }
        if (x != 0.0) {
            e.c_.push_back(x);
        }
        return e;
    }

    int sign() const
    {
        if (c_.empty()) {
            return 0;
        }
        return c_.back() > 0.0 ? 1 : -1;
    }

    friend Expansion operator+(const Expansion& e, const Expansion& f) { return sum(e, f); }

    friend Expansion operator-(const Expansion& e, const Expansion& f)
    {
        Expansion nf = f;
        for (double& v : nf.c_) {
            v = -v;
        }
        return sum(e, nf);
    }

    friend Expansion operator*(const Expansion& e, const Expansion& f)
    {
        Expansion out;
        for (double fv : f.c_) {
            out = sum(out, scale(e, fv));
        }
        return out;
    }

private:
    static void two_sum(double a, double b, double& x, double& y)
    {
        x = a + b;
        const double bv = x - a;
        const double av = x - bv;
        y = (a - av) + (b - bv);
    }

    static void fast_two_sum(double a, double b, double& x, double& y)
    {
        x = a + b;
        y = b - (x - a);
    }

    // Linear-time merge-and-renormalise (fast_expansion_sum_zeroelim).
    static Expansion sum(const Expansion& e, const Expansion& f)
    {
        if (e.c_.empty()) {
            return f;
        }
        if (f.c_.empty()) {
            return e;
        }
        const auto& ec = e.c_;
        const auto& fc = f.c_;
        Expansion h;
        h.c_.reserve(ec.size() + fc.size());
        std::size_t ei = 0;
        std::size_t fi = 0;
        double enow = ec[0];
        double fnow = fc[0];
        double q;
        if ((fnow > enow) == (fnow > -enow)) {
            q = enow;
            enow = ++ei < ec.size() ? ec[ei] : 0.0;
        } else {
            q = fnow;
            fnow = ++fi < fc.size() ? fc[fi] : 0.0;
        }
        double qnew;
        double hh;
        if (ei < ec.size() && fi < fc.size()) {
            if ((fnow > enow) == (fnow > -enow)) {
                fast_two_sum(enow, q, qnew, hh);
                enow = ++ei < ec.size() ? ec[ei] : 0.0;
            } else {
                fast_two_sum(fnow, q, qnew, hh);
                fnow = ++fi < fc.size() ? fc[fi] : 0.0;
            }
            q = qnew;
            if (hh != 0.0) {
                h.c_.push_back(hh);
            }
            while (ei < ec.size() && fi < fc.size()) {
                if ((fnow > enow) == (fnow > -enow)) {
                    two_sum(q, enow, qnew, hh);
                    enow = ++ei < ec.size() ? ec[ei] : 0.0;
                } else {
                    two_sum(q, fnow, qnew, hh);
                    fnow = ++fi < fc.size() ? fc[fi] : 0.0;
                }
                q = qnew;
                if (hh != 0.0) {
                    h.c_.push_back(hh);
                }
            }
        }
        while (ei < ec.size()) {
            two_sum(q, enow, qnew, hh);
            enow = ++ei < ec.size() ? ec[ei] : 0.0;
            q = qnew;
            if (hh != 0.0) {
                h.c_.push_back(hh);
            }
        }
        while (fi < fc.size()) {
            two_sum(q, fnow, qnew, hh);
            fnow = ++fi < fc.size() ? fc[fi] : 0.0;
            q = qnew;
            if (hh != 0.0) {
                h.c_.push_back(hh);
            }
        }
        if (q != 0.0 || h.c_.empty()) {
            if (q != 0.0) {
                h.c_.push_back(q);
            }
        }
        return h;
    }

    // scale_expansion_zeroelim with an fma-based two_product.
    static Expansion scale(const Expansion& e, double b)
    {
        Expansion h;
        if (e.c_.empty() || b == 0.0) {
            return h;
        }
        h.c_.reserve(2 * e.c_.size());
        double q = e.c_[0] * b;
        double hh = std::fma(e.c_[0], b, -q);
        if (hh != 0.0) {
            h.c_.push_back(hh);
        }
        for (std::size_t i = 1; i < e.c_.size(); ++i) {
            const double p1 = e.c_[i] * b;
            const double p0 = std::fma(e.c_[i], b, -p1);
            double sum;
            two_sum(q, p0, sum, hh);
            if (hh != 0.0) {
                h.c_.push_back(hh);
            }
            fast_two_sum(p1, sum, q, hh);
            if (hh != 0.0) {
                h.c_.push_back(hh);
            }
        }
        if (q != 0.0) {
            h.c_.push_back(q);
        }
        return h;
    }

    std::vector<double> c_;
};

constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kOrientBound = (7.0 + 56.0 * kEps) * kEps * 2.0;
constexpr double kSphereBound = (16.0 + 224.0 * kEps) * kEps * 2.0;

} // namespace

int orient3d_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d)
{
    const Expansion bax = Expansion::difference(b.x, a.x);
    const Expansion bay = Expansion::difference(b.y, a.y);
    const Expansion baz = Expansion::difference(b.z, a.z);
    const Expansion cax = Expansion::difference(c.x, a.x);
    const Expansion cay = Expansion::difference(c.y, a.y);
    const Expansion caz = Expansion::difference(c.z, a.z);
    const Expansion dax = Expansion::difference(d.x, a.x);
    const Expansion day = Expansion::difference(d.y, a.y);
    const Expansion daz = Expansion::difference(d.z, a.z);
    const Expansion det = bax * (cay * daz - caz * day) - bay * (cax * daz - caz * dax) +
                          baz * (cax * day - cay * dax);
    return det.sign();
}

int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d)
{
    const double bax = b.x - a.x, bay = b.y - a.y, baz = b.z - a.z;
    const double cax = c.x - a.x, cay = c.y - a.y, caz = c.z - a.z;
    const double dax = d.x - a.x, day = d.y - a.y, daz = d.z - a.z;
    const double m1 = cay * daz, m2 = caz * day;
    const double m3 = cax * daz, m4 = caz * dax;
    const double m5 = cax * day, m6 = cay * dax;
    const double det = bax * (m1 - m2) - bay * (m3 - m4) + baz * (m5 - m6);
    const double perm = std::abs(bax) * (std::abs(m1) + std::abs(m2)) +
                        std::abs(bay) * (std::abs(m3) + std::abs(m4)) +
                        std::abs(baz) * (std::abs(m5) + std::abs(m6));
    const double bound = kOrientBound * perm;
    if (det > bound) {
        return 1;
    }
    if (-det > bound) {
        return -1;
    }
    g_orient_exact.fetch_add(1, std::memory_order_relaxed);
    return orient3d_exact(a, b, c, d);
}

int in_sphere_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d, const Point3& e)
{
    using E = Expansion;
    const E aex = E::difference(a.x, e.x), aey = E::difference(a.y, e.y), aez = E::difference(a.z, e.z);
    const E bex = E::difference(b.x, e.x), bey = E::difference(b.y, e.y), bez = E::difference(b.z, e.z);
    const E cex = E::difference(c.x, e.x), cey = E::difference(c.y, e.y), cez = E::difference(c.z, e.z);
    const E dex = E::difference(d.x, e.x), dey = E::difference(d.y, e.y), dez = E::difference(d.z, e.z);

    const E ab = aex * bey - bex * aey;
    const E bc = bex * cey - cex * bey;
    const E cd = cex * dey - dex * cey;
    const E da = dex * aey - aex * dey;
    const E ac = aex * cey - cex * aey;
    const E bd = bex * dey - dex * bey;

    const E abc = aez * bc - bez * ac + cez * ab;
    const E bcd = bez * cd - cez * bd + dez * bc;
    const E cda = cez * da + dez * ac + aez * cd;
    const E dab = dez * ab + aez * bd + bez * da;

    const E alift = aex * aex + aey * aey + aez * aez;
    const E blift = bex * bex + bey * bey + bez * bez;
    const E clift = cex * cex + cey * cey + cez * cez;
    const E dlift = dex * dex + dey * dey + dez * dez;

    const E det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);
    // The lifted determinant is positive for "inside" with left-handed input.
    return -det.sign();
}

int in_sphere(const Point3& a, const Point3& b, const Point3& c, const Point3& d, const Point3& e)
{
    const double aex = a.x - e.x, aey = a.y - e.y, aez = a.z - e.z;
    const double bex = b.x - e.x, bey = b.y - e.y, bez = b.z - e.z;
    const double cex = c.x - e.x, cey = c.y - e.y, cez = c.z - e.z;
    const double dex = d.x - e.x, dey = d.y - e.y, dez = d.z - e.z;

    const double ab = aex * bey - bex * aey;
    const double bc = bex * cey - cex * bey;
    const double cd = cex * dey - dex * cey;
    const double da = dex * aey - aex * dey;
    const double ac = aex * cey - cex * aey;
    const double bd = bex * dey - dex * bey;

    const double abc = aez * bc - bez * ac + cez * ab;
    const double bcd = bez * cd - cez * bd + dez * bc;
    const double cda = cez * da + dez * ac + aez * cd;
    const double dab = dez * ab + aez * bd + bez * da;

    const double alift = aex * aex + aey * aey + aez * aez;
    const double blift = bex * bex + bey * bey + bez * bez;
    const double clift = cex * cex + cey * cey + cez * cez;
    const double dlift = dex * dex + dey * dey + dez * dez;

    const double det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

    const double abp = std::abs(aex * bey) + std::abs(bex * aey);
    const double bcp = std::abs(bex * cey) + std::abs(cex * bey);
    const double cdp = std::abs(cex * dey) + std::abs(dex * cey);
    const double dap = std::abs(dex * aey) + std::abs(aex * dey);
    const double acp = std::abs(aex * cey) + std::abs(cex * aey);
    const double bdp = std::abs(bex * dey) + std::abs(dex * bey);
    const double perm =
        (clift * (std::abs(dez) * abp + std::abs(aez) * bdp + std::abs(bez) * dap) +
         dlift * (std::abs(aez) * bcp + std::abs(bez) * acp + std::abs(cez) * abp)) +
        (alift * (std::abs(bez) * cdp + std::abs(cez) * bdp + std::abs(dez) * bcp) +
         blift * (std::abs(cez) * dap + std::abs(dez) * acp + std::abs(aez) * cdp));
    const double bound = kSphereBound * perm;
    if (det > bound) {
        return -1;
    }
    if (-det > bound) {
        return 1;
    }
    g_sphere_exact.fetch_add(1, std::memory_order_relaxed);
    return in_sphere_exact(a, b, c, d, e);
}

PredicateStats predicate_stats()
{
    return {g_orient_exact.load(), g_sphere_exact.load()};
}

} // namespace ballquad::detail
