/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <map>
#include <string>

#include "json.hpp"
#include "zcoup/measures.hpp"
#include "zcoup/transport.hpp"

namespace zcoup {

class DiscretePotential;

/// 17 significant digits; "inf" and "-inf" for infinities.
std::string format_real(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Measure CSV: header x0,...,x{d-1},w.
DiscreteMeasure parse_measure_csv(const std::string& text);
std::string format_measure_csv(const DiscreteMeasure& m);

// Coupling CSV: header src,dst,mass; the literal O stands for the origin.
ZeroCoupling parse_coupling_csv(const std::string& text, const DiscreteMeasure& sources,
                                const DiscreteMeasure& targets);
std::string format_coupling_csv(const ZeroCoupling& g);

// Support CSV: header x0..x{d-1},y0..y{d-1}.
SupportSet parse_support_csv(const std::string& text);
std::string format_support_csv(const SupportSet& s);

// Potential CSV: header x0..x{d-1},psi,g0..g{d-1}.
DiscretePotential parse_potential_csv(const std::string& text);
std::string format_potential_csv(const DiscretePotential& p);

/// key = value lines; '#' starts a comment. Duplicate keys are an error.
using Config = std::map<std::string, std::string>;
Config parse_config(const std::string& text);

/// Keys: dim, alpha, angular_kind (discrete|density), angular_spec,
/// angular_mass, smooth, resolution. Discrete specs list atoms as
/// "u0,u1:w|u0,u1:w"; directions are normalised.
HomogeneousMeasure homogeneous_from_config(const Config& cfg);

double config_real(const Config& cfg, const std::string& key, std::optional<double> fallback = {});
int config_int(const Config& cfg, const std::string& key, std::optional<int> fallback = {});
bool config_bool(const Config& cfg, const std::string& key, std::optional<bool> fallback = {});
std::string config_string(const Config& cfg, const std::string& key,
                          std::optional<std::string> fallback = {});

using Json = nlohmann::ordered_json;
/// Serialise with every float printed to 17 significant digits and
/// non-finite floats as null.
std::string dump_json(const Json& j, int indent = 2);

}  // namespace zcoup
