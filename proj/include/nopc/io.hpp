// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_IO_HPP
#define NOPC_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nopc/neural_operator.hpp"
#include "nopc/reduction.hpp"

namespace nopc
{

std::string read_file(const std::filesystem::path &path);
// Writes through a temporary sibling and renames, creating parent directories.
void write_file(const std::filesystem::path &path, std::string_view contents);

// "field q" followed by one coefficient per line.
std::string write_field_text(std::span<const double> values);
std::vector<double> read_field_text(std::string_view text);

std::uint32_t crc32(std::string_view bytes);

// Binary container: magic "NOD1", u32 q_m, q_u, N, then m_mean, u_mean and the column-major
// M, U blocks as little-endian f64, then a u32 CRC-32 of everything before it.
// The problem id and seed are not part of the format.
std::string write_dataset(const DataSet &data);
DataSet read_dataset(std::string_view bytes, ProblemId problem = ProblemId::Source,
                     std::uint64_t seed = 0);

// "proj q r", the mean, r basis columns, then "sigma n" and the full spectrum.
std::string write_projector(const Projector &p);
Projector read_projector(std::string_view text);

// "model r_m r_u blocks rank", the CRC-32 of both serialized projectors, both projectors,
// then "params n" and the trainable parameters in layout order.
std::string write_model(const Surrogate &net);
Surrogate read_model(std::string_view text);

}  // namespace nopc

#endif  // NOPC_IO_HPP
