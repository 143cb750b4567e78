// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "isacest/channel.hpp"
#include "isacest/estimator.hpp"
#include "isacest/grid.hpp"
#include "isacest/txgen.hpp"

#include <iosfwd>
#include <string>

namespace isacest::io {

/// Shortest-safe decimal form: 17 significant digits, round-trips exactly.
std::string format_double(double value);

// Mask:
//   mask <N_F> <N_T> <seed>
//   P <symbol> <subcarrier>      (one per pilot)
//   D <symbol> <subcarrier>      (one per data element)
//   end
void write_mask(std::ostream& out, const AllocationMask& mask);
AllocationMask read_mask(std::istream& in);

// Frame:
//   frame <eta> <beta>
//   <mask block>
//   <symbol> <subcarrier> <re> <im>   (used elements, canonical order)
//   end
void write_frame(std::ostream& out, const Frame& frame);
Frame read_frame(std::istream& in);

// Observation:
//   observation <N_F> <N_T> <N_U> <noise_var>
//   <symbol> <subcarrier> <y_re> <y_im> <x_re> <x_im>   (canonical order)
//
// The lines do not say which elements are pilots. Without `mask` every
// element is read back as data; with `mask` its used set must match the file.
void write_observation(std::ostream& out, const Observation& obs);
Observation read_observation(std::istream& in, const AllocationMask* mask = nullptr);

void write_report(std::ostream& out, const EstimationReport& report);

}  // namespace isacest::io
