#include "texsynth/audio.hpp"
#include "texsynth/fft.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>

using namespace texsynth;

namespace {

constexpr double kPi = 3.141592653589793238462643383280;

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/texsynth_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

// minimal PCM16 writer for read_wav tests
void write_pcm16(const std::string& path, const std::vector<std::int16_t>& interleaved,
                 int channels, int rate) {
  std::ofstream out(path, std::ios::binary);
  auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  out.write("RIFF", 4);
  u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(1);
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * 2));
  u16(static_cast<std::uint16_t>(channels * 2));
  u16(16);
  out.write("data", 4);
  u32(data_bytes);
  out.write(reinterpret_cast<const char*>(interleaved.data()), data_bytes);
}

} // namespace

TEST_CASE("wav float32 round trip is bit-exact") {
  AudioBuffer buf = testutil::random_buffer(4321, 16000, 1);
  // float32 container: quantize through float first
  for (double& s : buf.samples) s = static_cast<float>(s);
  TempFile f("rt.wav");
  write_wav(buf, f.path);
  const AudioBuffer back = read_wav(f.path);
  REQUIRE(back.sample_rate == 16000);
  REQUIRE(back.samples.size() == buf.samples.size());
  for (std::size_t i = 0; i < buf.samples.size(); ++i)
    CHECK(back.samples[i] == buf.samples[i]);
}

TEST_CASE("wav writer rejects empty buffers and counts frames") {
  AudioBuffer empty;
  empty.sample_rate = 16000;
  CHECK_THROWS(write_wav(empty, "/tmp/texsynth_test_empty.wav"));

  AudioBuffer seven = testutil::random_buffer(7 * 16000, 16000, 2);
  TempFile f("seven.wav");
  write_wav(seven, f.path);
  CHECK(read_wav(f.path).samples.size() == 112000);
}

TEST_CASE("pcm16 scaling and stereo mixdown") {
  TempFile f("pcm.wav");
  // mono: full-scale negative maps to -1.0
  write_pcm16(f.path, {-32768, 16384, 0}, 1, 16000);
  AudioBuffer mono = read_wav(f.path);
  REQUIRE(mono.samples.size() == 3);
  CHECK(mono.samples[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(mono.samples[1] == doctest::Approx(0.5).epsilon(1e-12));

  // stereo averages channels
  write_pcm16(f.path, {8192, 16384, -8192, 8192}, 2, 44100);
  AudioBuffer st = read_wav(f.path);
  REQUIRE(st.samples.size() == 2);
  CHECK(st.samples[0] == doctest::Approx((8192.0 + 16384.0) / 2.0 / 32768.0));
  CHECK(st.samples[1] == doctest::Approx(0.0));
  CHECK(st.sample_rate == 44100);
}

TEST_CASE("read_wav error paths") {
  CHECK_THROWS(read_wav("/tmp/texsynth_does_not_exist.wav"));
  TempFile f("junk.wav");
  std::ofstream(f.path) << "this is not a wav";
  CHECK_THROWS(read_wav(f.path));
}

TEST_CASE("resample identity and duration") {
  AudioBuffer buf = testutil::random_buffer(48000, 48000, 3);
  const AudioBuffer same = resample(buf, 48000);
  CHECK(same.samples == buf.samples);

  const AudioBuffer down = resample(buf, 16000);
  CHECK(down.sample_rate == 16000);
  CHECK(std::llabs(static_cast<long long>(down.samples.size()) - 16000) <= 1);
}

TEST_CASE("resampled sine matches the analytic signal") {
  const double freq = 1000.0;
  AudioBuffer buf;
  buf.sample_rate = 48000;
  buf.samples.resize(48000);
  for (std::size_t i = 0; i < buf.samples.size(); ++i)
    buf.samples[i] = std::sin(2.0 * kPi * freq * i / 48000.0);

  const AudioBuffer down = resample(buf, 16000);
  const int trim = 200;
  double max_err = 0.0;
  for (std::size_t i = trim; i + trim < down.samples.size(); ++i) {
    const double want = std::sin(2.0 * kPi * freq * i / 16000.0);
    max_err = std::max(max_err, std::abs(down.samples[i] - want));
  }
  CHECK(max_err < 1e-3);
}

TEST_CASE("normalize_energy hits the target and is idempotent") {
  AudioBuffer buf = testutil::random_buffer(10000, 16000, 4, 0.37);
  const AudioBuffer once = normalize_energy(buf, 1.0);
  CHECK(variance(once.samples) == doctest::Approx(1.0).epsilon(1e-9));

  const AudioBuffer twice = normalize_energy(once, 1.0);
  for (std::size_t i = 0; i < once.samples.size(); ++i)
    CHECK(twice.samples[i] == doctest::Approx(once.samples[i]).epsilon(1e-9));

  AudioBuffer constant;
  constant.sample_rate = 16000;
  constant.samples.assign(100, 0.7);
  CHECK_THROWS(normalize_energy(constant, 1.0));
}

TEST_CASE("anchor is deterministic and spectrum-matched") {
  // narrowband reference: 2 kHz sine
  AudioBuffer ref;
  ref.sample_rate = 16000;
  ref.samples.resize(16000);
  for (std::size_t i = 0; i < ref.samples.size(); ++i)
    ref.samples[i] = 0.3 * std::sin(2.0 * kPi * 2000.0 * i / 16000.0);

  const AudioBuffer a1 = make_anchor(ref, 42);
  const AudioBuffer a2 = make_anchor(ref, 42);
  CHECK(a1.samples == a2.samples);

  CHECK(variance(a1.samples) ==
        doctest::Approx(variance(ref.samples)).epsilon(1e-6));

  // band-energy oracle: >= 90% of energy within +-50 Hz of 2 kHz
  RealFft fft(static_cast<int>(a1.samples.size()));
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(a1.samples.data(), spec.data());
  double total = 0.0, band = 0.0;
  for (int k = 1; k < fft.bins(); ++k) { // skip DC (mean-centered anyway)
    const double e = std::norm(spec[k]);
    total += e;
    if (k >= 1950 && k <= 2050) band += e;
  }
  CHECK(band / total >= 0.9);
}

TEST_CASE("anchors from different seeds differ but share the envelope") {
  AudioBuffer ref = testutil::random_buffer(8000, 16000, 5);
  const AudioBuffer a1 = make_anchor(ref, 1);
  const AudioBuffer a2 = make_anchor(ref, 2);
  CHECK(a1.samples != a2.samples);

  auto smoothed_mag = [](const AudioBuffer& b) {
    RealFft fft(static_cast<int>(b.samples.size()));
    std::vector<std::complex<double>> spec(fft.bins());
    fft.forward(b.samples.data(), spec.data());
    std::vector<double> mag(fft.bins()), sm(fft.bins());
    for (int k = 0; k < fft.bins(); ++k) mag[k] = std::abs(spec[k]);
    for (int k = 0; k < fft.bins(); ++k) {
      const int lo = std::max(0, k - 4), hi = std::min(fft.bins() - 1, k + 4);
      double s = 0.0;
      for (int j = lo; j <= hi; ++j) s += mag[j];
      sm[k] = s / (hi - lo + 1);
    }
    return sm;
  };
  const auto m1 = smoothed_mag(a1), m2 = smoothed_mag(a2);
  double diff2 = 0.0, norm2 = 0.0;
  for (std::size_t k = 0; k < m1.size(); ++k) {
    diff2 += (m1[k] - m2[k]) * (m1[k] - m2[k]);
    norm2 += m1[k] * m1[k];
  }
  CHECK(std::sqrt(diff2 / norm2) < 0.01);
}
