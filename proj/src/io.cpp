// SPDX-License-Identifier: Apache-2.0

#include "nopc/io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nopc/error.hpp"
#include "nopc/text_format.hpp"

namespace nopc
{

namespace fs = std::filesystem;

std::string read_file(const fs::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path &path, std::string_view contents)
{
  if (path.has_parent_path())
  {
    fs::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
    {
      throw std::runtime_error("cannot write " + path.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
    {
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  fs::rename(tmp, path);
}

namespace
{

void append_block(std::string &out, std::span<const double> v)
{
  for (double x : v)
  {
    append_double(out, x);
    out += '\n';
  }
}

std::vector<double> read_block(TokenReader &in, std::size_t n)
{
  std::vector<double> v(n);
  for (auto &x : v)
  {
    x = in.next_double();
  }
  return v;
}

std::size_t read_count(TokenReader &in)
{
  const auto n = in.next_int();
  if (n < 0)
  {
    throw FormatError("line " + std::to_string(in.line()) + ": negative size");
  }
  return static_cast<std::size_t>(n);
}

void put_u32(std::string &out, std::uint32_t v)
{
  for (int k = 0; k < 4; ++k)
  {
    out += static_cast<char>((v >> (8 * k)) & 0xffu);
  }
}

void put_f64(std::string &out, std::span<const double> v)
{
  for (double x : v)
  {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int k = 0; k < 8; ++k)
    {
      out += static_cast<char>((bits >> (8 * k)) & 0xffu);
    }
  }
}

class ByteReader
{
public:
  explicit ByteReader(std::string_view b) : b_(b) {}

  std::uint64_t raw(int n)
  {
    if (pos_ + static_cast<std::size_t>(n) > b_.size())
    {
      throw FormatError("dataset truncated");
    }
    std::uint64_t v = 0;
    for (int k = 0; k < n; ++k)
    {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_++])) << (8 * k);
    }
    return v;
  }

  void f64(std::span<double> out)
  {
    for (auto &x : out)
    {
      x = std::bit_cast<double>(raw(8));
    }
  }

  std::size_t pos() const { return pos_; }

private:
  std::string_view b_;
  std::size_t pos_ = 0;
};

constexpr std::string_view dataset_magic = "NOD1";

}  // namespace

std::string write_field_text(std::span<const double> values)
{
  std::string out = "field " + std::to_string(values.size()) + "\n";
  append_block(out, values);
  return out;
}

std::vector<double> read_field_text(std::string_view text)
{
  TokenReader in(text);
  in.expect("field");
  const auto n = read_count(in);
  auto v = read_block(in, n);
  if (!in.at_end())
  {
    throw FormatError("trailing data after field");
  }
  return v;
}

std::uint32_t crc32(std::string_view bytes)
{
  uLong c = ::crc32(0L, Z_NULL, 0);
  c = ::crc32_z(c, reinterpret_cast<const Bytef *>(bytes.data()), bytes.size());
  return static_cast<std::uint32_t>(c);
}

std::string write_dataset(const DataSet &data)
{
  const auto q_m = data.m_data.rows();
  const auto q_u = data.u_data.rows();
  const auto n = data.size();
  NOPC_REQUIRE(data.u_data.cols() == n, "M and U column counts differ");
  NOPC_REQUIRE(data.m_mean.size() == q_m && data.u_mean.size() == q_u, "mean sizes");
  std::string out(dataset_magic);
  out.reserve(16 + 8 * (q_m + q_u) * (n + 1) + 4);
  put_u32(out, static_cast<std::uint32_t>(q_m));
  put_u32(out, static_cast<std::uint32_t>(q_u));
  put_u32(out, static_cast<std::uint32_t>(n));
  put_f64(out, data.m_mean);
  put_f64(out, data.u_mean);
  put_f64(out, data.m_data.data());
  put_f64(out, data.u_data.data());
  put_u32(out, crc32(out));
  return out;
}

DataSet read_dataset(std::string_view bytes, ProblemId problem, std::uint64_t seed)
{
  if (bytes.size() < 20 || bytes.substr(0, 4) != dataset_magic)
  {
    throw FormatError("not a NOD1 dataset");
  }
  const auto body = bytes.substr(0, bytes.size() - 4);
  ByteReader tail(bytes.substr(bytes.size() - 4));
  if (static_cast<std::uint32_t>(tail.raw(4)) != crc32(body))
  {
    throw FormatError("dataset checksum mismatch");
  }
  ByteReader in(body.substr(4));
  const auto q_m = static_cast<std::size_t>(in.raw(4));
  const auto q_u = static_cast<std::size_t>(in.raw(4));
  const auto n = static_cast<std::size_t>(in.raw(4));
  if (12 + 8 * (q_m + q_u) * (n + 1) != body.size() - 4)
  {
    throw FormatError("dataset size does not match its header");
  }
  DataSet d;
  d.problem = problem;
  d.seed = seed;
  d.m_mean.resize(q_m);
  d.u_mean.resize(q_u);
  d.m_data = Matrix(q_m, n);
  d.u_data = Matrix(q_u, n);
  in.f64(d.m_mean);
  in.f64(d.u_mean);
  in.f64(d.m_data.data());
  in.f64(d.u_data.data());
  return d;
}

std::string write_projector(const Projector &p)
{
  const auto q = p.dim();
  const auto r = p.rank();
  NOPC_REQUIRE(p.mean.size() == q, "mean size");
  std::string out = "proj " + std::to_string(q) + " " + std::to_string(r) + "\n";
  append_block(out, p.mean);
  for (std::size_t j = 0; j < r; ++j)
  {
    append_block(out, p.basis.col(j));
  }
  out += "sigma " + std::to_string(p.singular_values.size()) + "\n";
  append_block(out, p.singular_values);
  return out;
}

namespace
{

Projector parse_projector(TokenReader &in)
{
  in.expect("proj");
  const auto q = read_count(in);
  const auto r = read_count(in);
  if (r > q)
  {
    throw FormatError("projector rank exceeds dimension");
  }
  Projector p;
  p.mean = read_block(in, q);
  p.basis = Matrix(q, r);
  for (std::size_t j = 0; j < r; ++j)
  {
    for (auto &x : p.basis.col(j))
    {
      x = in.next_double();
    }
  }
  in.expect("sigma");
  p.singular_values = read_block(in, read_count(in));
  return p;
}

std::string hex32(std::uint32_t v)
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(8, '0');
  for (int k = 7; k >= 0; --k, v >>= 4)
  {
    s[static_cast<std::size_t>(k)] = digits[v & 0xfu];
  }
  return s;
}

}  // namespace

Projector read_projector(std::string_view text)
{
  TokenReader in(text);
  auto p = parse_projector(in);
  if (!in.at_end())
  {
    throw FormatError("trailing data after projector");
  }
  return p;
}

std::string write_model(const Surrogate &net)
{
  const auto &c = net.config();
  const auto pin = write_projector(net.input_projector());
  const auto pout = write_projector(net.output_projector());
  std::string out = "model " + std::to_string(c.r_m) + " " + std::to_string(c.r_u) + " " +
                    std::to_string(c.n_blocks) + " " + std::to_string(c.block_rank) + "\n";
  out += "frozen " + hex32(crc32(pin)) + " " + hex32(crc32(pout)) + "\n";
  out += pin;
  out += pout;
  out += "params " + std::to_string(net.parameters().size()) + "\n";
  append_block(out, net.parameters());
  return out;
}

Surrogate read_model(std::string_view text)
{
  TokenReader in(text);
  in.expect("model");
  NetConfig cfg;
  cfg.r_m = read_count(in);
  cfg.r_u = read_count(in);
  cfg.n_blocks = read_count(in);
  cfg.block_rank = read_count(in);
  in.expect("frozen");
  const std::string crc_in(in.next());
  const std::string crc_out(in.next());
  auto pin = parse_projector(in);
  auto pout = parse_projector(in);
  if (hex32(crc32(write_projector(pin))) != crc_in ||
      hex32(crc32(write_projector(pout))) != crc_out)
  {
    throw FormatError("model projector checksum mismatch");
  }
  Surrogate net(cfg, std::move(pin), std::move(pout));
  in.expect("params");
  if (read_count(in) != net.parameters().size())
  {
    throw FormatError("parameter count does not match the architecture");
  }
  for (auto &x : net.parameters())
  {
    x = in.next_double();
  }
  if (!in.at_end())
  {
    throw FormatError("trailing data after model");
  }
  return net;
}

}  // namespace nopc
