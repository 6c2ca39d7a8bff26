#include "funk/sampling.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <system_error>

namespace funk {

bool XDomain::contains(std::span<const double> x) const {
  if (kind == Kind::Box) {
    for (double v : x) {
      if (v < lo || v > hi) return false;
    }
    return true;
  }
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return r2 <= radius * radius;
}

double XDomain::max_abs_linear(std::span<const double> w) const {
  if (kind == Kind::Box) {
    const double m = std::max(std::abs(lo), std::abs(hi));
    double acc = 0.0;
    for (double v : w) acc += std::abs(v) * m;
    return acc;
  }
  double norm = 0.0;
  for (double v : w) norm += v * v;
  return radius * std::sqrt(norm);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number in domain: '" + std::string(s) + "'");
  }
  return v;
}

// "name(a,b,...)" -> name, args
std::pair<std::string_view, std::vector<double>> call(std::string_view s) {
  s = trim(s);
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') {
    throw std::invalid_argument("bad domain component: '" + std::string(s) + "'");
  }
  std::vector<double> args;
  std::string_view inner = s.substr(open + 1, s.size() - open - 2);
  while (!inner.empty()) {
    const auto comma = inner.find(',');
    args.push_back(to_double(inner.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
  }
  return {trim(s.substr(0, open)), args};
}

}  // namespace

SamplingDomain SamplingDomain::parse(std::string_view text, const SamplingDomain& base) {
  SamplingDomain out = base;
  while (!text.empty()) {
    const auto semi = text.find(';');
    const std::string_view part = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (part.empty()) continue;
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("domain part must look like x:... or y:...");
    }
    const auto key = trim(part.substr(0, colon));
    const auto [name, args] = call(part.substr(colon + 1));
    if (key == "x" && name == "box" && args.size() == 2 && args[0] < args[1]) {
      out.x = XDomain::box(args[0], args[1]);
    } else if (key == "x" && name == "ball" && args.size() == 1 && args[0] > 0.0) {
      out.x = XDomain::ball(args[0]);
    } else if (key == "y" && name == "annulus" && args.size() == 2 && args[0] > 0.0 &&
               args[0] <= args[1]) {
      out.y = YAnnulus{args[0], args[1]};
    } else {
      throw std::invalid_argument("unsupported domain part '" + std::string(part) + "'");
    }
  }
  return out;
}

namespace {

// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string SamplingDomain::to_string() const {
  std::string out;
  if (x.kind == XDomain::Kind::Box) {
    out = "x:box(" + shortest(x.lo) + "," + shortest(x.hi) + ")";
  } else {
    out = "x:ball(" + shortest(x.radius) + ")";
  }
  return out + ";y:annulus(" + shortest(y.r_min) + "," + shortest(y.r_max) + ")";
}

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(counter),
                    static_cast<std::uint32_t>(counter >> 32)};
  engine_.seed(seq);
}

double SampleRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SampleRng::normal() {
  // Box-Muller; 1 - u keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SampleSet draw_samples(const SamplingDomain& domain, int n, int count, std::uint64_t seed,
                       std::uint64_t stream) {
  if (n < 2) throw std::invalid_argument("sampling dimension must be at least 2");
  if (count < 1) throw std::invalid_argument("sample count must be at least 1");
  SampleSet set{seed, stream, domain, {}};
  set.points.reserve(static_cast<std::size_t>(count));
  const auto nn = static_cast<std::size_t>(n);
  for (int k = 0; k < count; ++k) {
    SampleRng rng(seed, stream, static_cast<std::uint64_t>(k));
    std::vector<double> x(nn), y(nn);
    if (domain.x.kind == XDomain::Kind::Box) {
      for (auto& v : x) v = rng.uniform(domain.x.lo, domain.x.hi);
    } else {
      double norm = 0.0;
      do {
        norm = 0.0;
        for (auto& v : x) {
          v = rng.normal();
          norm += v * v;
        }
      } while (norm == 0.0);
      const double r = domain.x.radius * std::pow(rng.uniform(), 1.0 / n);
      for (auto& v : x) v *= r / std::sqrt(norm);
    }
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : y) {
        v = rng.normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    const double r = rng.uniform(domain.y.r_min, domain.y.r_max);
    for (auto& v : y) v *= r / std::sqrt(norm);
    set.points.push_back(make_phase_point(std::move(x), std::move(y)));
  }
  return set;
}

}  // namespace funk
