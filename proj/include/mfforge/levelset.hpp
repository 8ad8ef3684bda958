#pragma once

#include "mfforge/common.hpp"

#include <span>

namespace mfforge {

enum class LevelSetRole { master, slave };

/// Analytic level-set function with its gradient. Immutable after
/// construction; safe to evaluate concurrently.
struct LevelSetField {
    ScalarField value;
    VectorField gradient;
    LevelSetRole role = LevelSetRole::master;
    int id = 0;

    double operator()(const Vec3& x) const { return value(x); }
    Vec3 grad(const Vec3& x) const { return gradient(x); }
};

/// One master level-set and the ordered slaves that bound its zero set.
/// Points with all slaves <= 0 belong to the manifold.
struct ManifoldDefinition {
    int ambient_dim = 3;
    LevelSetField master;
    std::vector<LevelSetField> slaves;

    void validate() const;
};

Vec3 to_point(int ambient_dim, std::span<const double> x);

double eval_master(const ManifoldDefinition& def, std::span<const double> x);
std::vector<double> eval_slaves(const ManifoldDefinition& def, std::span<const double> x);
bool inside_manifold(const ManifoldDefinition& def, std::span<const double> x, double tol);

// Field factories used by the case registry and the tests.
LevelSetField sphere_field(const Vec3& center, double radius, int id = 0);
LevelSetField plane_field(const Vec3& point, const Vec3& normal, int id);
LevelSetField scaled_field(LevelSetField field, double factor);

/// Largest relative deviation between the analytic gradient and a central
/// difference with the given step, over the sample points.
double gradient_consistency_error(const LevelSetField& field, std::span<const Vec3> points, double step,
                                  int ambient_dim);

} // namespace mfforge
