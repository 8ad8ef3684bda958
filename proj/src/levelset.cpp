#include "mfforge/levelset.hpp"

#include <algorithm>
#include <set>

namespace mfforge {

void ManifoldDefinition::validate() const
{
    if (ambient_dim != 2 && ambient_dim != 3)
        throw ArgumentError("ambient dimension must be 2 or 3");
    if (!master.value || !master.gradient)
        throw ArgumentError("manifold has no master level-set");
    std::set<int> ids;
    for (const auto& s : slaves) {
        if (!s.value || !s.gradient)
            throw ArgumentError("slave level-set without callbacks");
        if (!ids.insert(s.id).second)
            throw ArgumentError("duplicate slave id " + std::to_string(s.id));
    }
}

Vec3 to_point(int ambient_dim, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != ambient_dim)
        throw ArgumentError("point has " + std::to_string(x.size()) + " components, expected "
                            + std::to_string(ambient_dim));
    Vec3 p = Vec3::Zero();
    for (int i = 0; i < ambient_dim; ++i)
        p[i] = x[i];
    return p;
}

double eval_master(const ManifoldDefinition& def, std::span<const double> x)
{
    return def.master(to_point(def.ambient_dim, x));
}

std::vector<double> eval_slaves(const ManifoldDefinition& def, std::span<const double> x)
{
    const Vec3 p = to_point(def.ambient_dim, x);
    std::vector<double> out;
    out.reserve(def.slaves.size());
    for (const auto& s : def.slaves)
        out.push_back(s(p));
    return out;
}

bool inside_manifold(const ManifoldDefinition& def, std::span<const double> x, double tol)
{
    if (tol < 0.0)
        throw ArgumentError("tolerance must be non-negative");
    const Vec3 p = to_point(def.ambient_dim, x);
    return std::all_of(def.slaves.begin(), def.slaves.end(), [&](const LevelSetField& s) { return s(p) <= tol; });
}

LevelSetField sphere_field(const Vec3& center, double radius, int id)
{
    LevelSetField f;
    f.value = [center, radius](const Vec3& x) { return (x - center).norm() - radius; };
    f.gradient = [center](const Vec3& x) -> Vec3 {
        const Vec3 d = x - center;
        const double n = d.norm();
        return n > 0.0 ? Vec3(d / n) : Vec3::Zero();
    };
    f.id = id;
    return f;
}

LevelSetField plane_field(const Vec3& point, const Vec3& normal, int id)
{
    LevelSetField f;
    f.value = [point, normal](const Vec3& x) { return (x - point).dot(normal); };
    f.gradient = [normal](const Vec3&) { return normal; };
    f.role = LevelSetRole::slave;
    f.id = id;
    return f;
}

LevelSetField scaled_field(LevelSetField field, double factor)
{
    LevelSetField f = field;
    f.value = [v = field.value, factor](const Vec3& x) { return factor * v(x); };
    f.gradient = [g = field.gradient, factor](const Vec3& x) -> Vec3 { return factor * g(x); };
    return f;
}

double gradient_consistency_error(const LevelSetField& field, std::span<const Vec3> points, double step,
                                  int ambient_dim)
{
    double worst = 0.0;
    for (const Vec3& x : points) {
        const Vec3 g = field.grad(x);
        Vec3 fd = Vec3::Zero();
        for (int a = 0; a < ambient_dim; ++a) {
            Vec3 xp = x, xm = x;
            xp[a] += step;
            xm[a] -= step;
            fd[a] = (field(xp) - field(xm)) / (2.0 * step);
        }
        const double scale = std::max(g.norm(), 1e-300);
        worst = std::max(worst, (g - fd).norm() / scale);
    }
    return worst;
}

} // namespace mfforge
