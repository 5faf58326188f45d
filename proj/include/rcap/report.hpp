#ifndef RCAP_REPORT_HPP
#define RCAP_REPORT_HPP

#include <string>

#include "json.hpp"
#include "rcap/ambigcheck.hpp"
#include "rcap/capsearch.hpp"

namespace rcap {

using json = nlohmann::json;

inline constexpr char const * kSchema = "rc-1";

/// {"schema": "rc-1", "kind": kind} merged with body.
json envelope(std::string const & kind, json body);
/// Throws std::invalid_argument unless j carries the rc-1 schema and the kind.
void expect_kind(json const & j, std::string const & kind);

std::string sha256_hex(std::string const & data);
/// Compiler and GMP versions.
std::string toolchain_fingerprint();

json to_json(FiniteAbelianGroup const & G);
json to_json(ResidueCharacter const & c);
ResidueCharacter character_from_json(json const & j);

json to_json(CandidateCertificate const & c);
CandidateCertificate certificate_from_json(json const & j);

json to_json(CyclicFieldDesc const & f);
json to_json(SearchStats const & s);
json to_json(PowerHint const & h);

/// Certificate file: certificate, field, stats, fingerprint and a hash over
/// the canonical certificate text.
json certificate_file(SearchResult const & r);
/// Parses and checks the hash stamp.
CandidateCertificate read_certificate_file(json const & j);

json to_json(VerificationReport const & r, BiquadField const * L = nullptr);
json to_json(AmbigReport const & r);
AmbigReport ambig_report_from_json(json const & j);

/// Canonical text: sorted keys, no whitespace.
std::string canonical(json const & j);

} // namespace rcap

#endif
