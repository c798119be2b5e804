#include "texsynth/audio.hpp"

#include "texsynth/fft.hpp"
#include "texsynth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace texsynth {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return v.empty() ? 0.0 : s / v.size();
}

// ---------------------------------------------------------------- WAV I/O

namespace {

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return b[0] | (b[1] << 8);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<char*>(b), 2);
}

} // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open WAV file: " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0)
    throw std::runtime_error("not a RIFF file: " + path);
  read_u32(in); // riff size
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0)
    throw std::runtime_error("not a WAVE file: " + path);

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<char> data;
  bool have_fmt = false, have_data = false;

  while (in && !(have_fmt && have_data)) {
    in.read(tag, 4);
    if (!in) break;
    std::uint32_t size = read_u32(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = read_u16(in);
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in); // byte rate
      read_u16(in); // block align
      bits = read_u16(in);
      if (size > 16) in.ignore(size - 16);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      have_data = true;
    } else {
      in.ignore(size + (size & 1));
    }
  }
  if (!have_fmt || !have_data) throw std::runtime_error("malformed WAV file: " + path);
  if (channels == 0 || rate == 0) throw std::runtime_error("bad WAV header: " + path);

  const bool pcm16 = (format == 1 && bits == 16);
  const bool float32 = (format == 3 && bits == 32);
  if (!pcm16 && !float32)
    throw std::runtime_error("unsupported WAV codec (need PCM16 or float32): " + path);

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frames = data.size() / (bytes_per_sample * channels);
  if (frames == 0) throw std::runtime_error("zero-length audio: " + path);

  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(rate);
  buf.samples.resize(frames);
  for (std::size_t n = 0; n < frames; ++n) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const char* p = data.data() + (n * channels + c) * bytes_per_sample;
      if (pcm16) {
        std::int16_t s;
        std::memcpy(&s, p, 2);
        acc += s / 32768.0;
      } else {
        float f;
        std::memcpy(&f, p, 4);
        acc += f;
      }
    }
    buf.samples[n] = acc / channels;
  }
  return buf;
}

void write_wav(const AudioBuffer& buf, const std::string& path) {
  if (buf.samples.empty()) throw std::runtime_error("refusing to write empty audio buffer");
  if (buf.sample_rate <= 0) throw std::runtime_error("invalid sample rate");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  const std::uint32_t data_bytes = static_cast<std::uint32_t>(buf.samples.size() * 4);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 3); // IEEE float
  write_u16(out, 1); // mono
  write_u32(out, static_cast<std::uint32_t>(buf.sample_rate));
  write_u32(out, static_cast<std::uint32_t>(buf.sample_rate) * 4);
  write_u16(out, 4);
  write_u16(out, 32);
  out.write("data", 4);
  write_u32(out, data_bytes);
  for (double s : buf.samples) {
    float f = static_cast<float>(s);
    char b[4];
    std::memcpy(b, &f, 4);
    out.write(b, 4);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------- resample

namespace {

// zeroth-order modified Bessel, power series
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double h = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= h / (k * static_cast<double>(k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = 3.141592653589793238462643383280 * x;
  return std::sin(px) / px;
}

} // namespace

AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample: target_rate must be positive");
  if (target_rate == buf.sample_rate) return buf;

  const double ratio = static_cast<double>(target_rate) / buf.sample_rate;
  // Cutoff at 0.9x the lower Nyquist, in cycles per input sample.
  const double cutoff = 0.45 * std::min(1.0, ratio);
  // 64 taps per phase; when downsampling the kernel stretches by 1/ratio.
  const double half_width = 32.0 / std::min(1.0, ratio);
  const double beta = 8.6;
  const double i0_beta = bessel_i0(beta);

  const std::size_t n_in = buf.samples.size();
  const std::size_t n_out = static_cast<std::size_t>(std::llround(n_in * ratio));

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);

  for (std::size_t n = 0; n < n_out; ++n) {
    const double center = n / ratio;
    const long lo = std::max<long>(0, static_cast<long>(std::ceil(center - half_width)));
    const long hi = std::min<long>(static_cast<long>(n_in) - 1,
                                   static_cast<long>(std::floor(center + half_width)));
    double acc = 0.0, norm = 0.0;
    for (long m = lo; m <= hi; ++m) {
      const double t = m - center;
      const double u = t / half_width;
      const double w = sinc(2.0 * cutoff * t) * bessel_i0(beta * std::sqrt(1.0 - u * u)) / i0_beta;
      acc += buf.samples[m] * w;
      norm += w;
    }
    out.samples[n] = norm != 0.0 ? acc / norm : 0.0;
  }
  return out;
}

// ------------------------------------------------------------- energy norm

AudioBuffer normalize_energy(const AudioBuffer& buf, double target_variance) {
  if (target_variance <= 0.0) throw std::invalid_argument("target variance must be positive");
  const double m = mean(buf.samples);
  const double var = variance(buf.samples);
  if (var <= 0.0) throw std::runtime_error("cannot normalize a constant signal");
  const double gain = std::sqrt(target_variance / var);
  AudioBuffer out;
  out.sample_rate = buf.sample_rate;
  out.samples.resize(buf.samples.size());
  for (std::size_t i = 0; i < buf.samples.size(); ++i)
    out.samples[i] = (buf.samples[i] - m) * gain;
  return out;
}

// ------------------------------------------------------------------ anchor

AudioBuffer make_anchor(const AudioBuffer& reference, std::uint64_t seed) {
  const std::size_t n = reference.samples.size();
  if (n == 0) throw std::invalid_argument("make_anchor: empty reference");

  CounterRng rng(seed, /*stream=*/1);
  std::vector<double> noise(n);
  for (std::size_t i = 0; i < n; ++i) noise[i] = rng.gaussian(i);

  RealFft fft(static_cast<int>(n));
  const int bins = fft.bins();
  std::vector<std::complex<double>> ref_spec(bins), noise_spec(bins);
  fft.forward(reference.samples.data(), ref_spec.data());
  fft.forward(noise.data(), noise_spec.data());

  // 9-bin moving average of the reference magnitude, truncated at the edges.
  std::vector<double> mag(bins), smooth(bins);
  for (int k = 0; k < bins; ++k) mag[k] = std::abs(ref_spec[k]);
  for (int k = 0; k < bins; ++k) {
    const int lo = std::max(0, k - 4), hi = std::min(bins - 1, k + 4);
    double s = 0.0;
    for (int j = lo; j <= hi; ++j) s += mag[j];
    smooth[k] = s / (hi - lo + 1);
  }

  // keep noise phase, impose smoothed reference magnitude
  for (int k = 0; k < bins; ++k) {
    const double a = std::abs(noise_spec[k]);
    noise_spec[k] = a > 0.0 ? noise_spec[k] * (smooth[k] / a)
                            : std::complex<double>(smooth[k], 0.0);
  }

  AudioBuffer out;
  out.sample_rate = reference.sample_rate;
  out.samples.resize(n);
  fft.inverse(noise_spec.data(), out.samples.data());
  return normalize_energy(out, variance(reference.samples));
}

} // namespace texsynth
