#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfforge {

using Vec3 = Eigen::Vector3d;
using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

/// Hierarchical provenance key of a mesh node. Nodes with equal keys are the
/// same node; ordering of keys fixes the global numbering.
using NodeKey = std::vector<std::int64_t>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class MeshError : public Error {
public:
    using Error::Error;
};

class RelocationError : public Error {
public:
    using Error::Error;
};

class ReconstructionError : public Error {
public:
    ReconstructionError(const std::string& what, int cell = -1)
        : Error(cell >= 0 ? what + " (background cell " + std::to_string(cell) + ")" : what), cell_(cell)
    {
    }
    int cell() const noexcept { return cell_; }

private:
    int cell_;
};

class InvalidDataError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const noexcept { return line_; }

private:
    int line_;
};

class LookupError : public Error {
public:
    using Error::Error;
};

enum class Execution { serial, parallel };

} // namespace mfforge
