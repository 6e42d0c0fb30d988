#pragma once

#include <stdexcept>

namespace sepq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct NotHermitian : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };
struct TraceNotOne : Error { using Error::Error; };
struct NotIsometry : Error { using Error::Error; };
struct EmptyDecomposition : Error { using Error::Error; };
struct RankOutOfRange : Error { using Error::Error; };
struct NotPure : Error { using Error::Error; };
struct ZeroPolynomial : Error { using Error::Error; };
struct SizeOverflow : Error { using Error::Error; };
struct DegreeOverflow : Error { using Error::Error; };
struct CertificateCheckFailed : Error { using Error::Error; };

}  // namespace sepq
