#pragma once

#include <stdexcept>
#include <string>

namespace ballquad {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad parameters or malformed input. The CLI maps this to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

/// Node generation failed to meet its quality targets.
class GenerationError : public Error {
public:
    using Error::Error;
};

class TessellationError : public Error {
public:
    using Error::Error;
};

/// A boundary face of the tessellation has a vertex that is not on the sphere.
class DomainInconsistencyError : public Error {
public:
    using Error::Error;
};

/// The local saddle-point system of one tetrahedron could not be solved.
class LocalSingularityError : public Error {
public:
    LocalSingularityError(std::size_t tet, std::size_t n, std::size_t m_terms, const std::string& why)
        : Error("local system for tetrahedron " + std::to_string(tet) + " is singular (n=" +
                std::to_string(n) + ", M=" + std::to_string(m_terms) + "): " + why),
          tet_(tet) {}

    std::size_t tet() const noexcept { return tet_; }

private:
    std::size_t tet_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace ballquad
