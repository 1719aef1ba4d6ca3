#include "spad/reference.hpp"

#include <stdexcept>

namespace spad::reference {

EventImage simulate_image(const Image& image, double reference_lux,
                          const SensorConfig& config, std::uint64_t seed,
                          std::size_t n_det) {
  config.validate();
  for (double v : image) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("simulate_image: pixel outside [0,1]");
    }
  }
  EventImage out;
  out.exposure = n_det > 0 ? std::nullopt : std::optional<double>(config.exposure);
  out.dead_time = config.dead_time;
  out.pixels = Grid<EventStream>(image.height(), image.width());
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      RandomSource rng = RandomSource::for_pixel(seed, r, c);
      const Rate flux(lux_to_flux(reference_lux * image(r, c), config));
      out.pixels(r, c) = n_det > 0
                             ? simulate_fixed_count(flux, n_det, config, rng)
                             : simulate_pixel(flux, config, rng);
    }
  }
  return out;
}

GradientMap grad_log_likelihood_map(const EventImage& streams,
                                    const Grid<double>& flux) {
  require_same_shape(streams.pixels, flux, "grad_log_likelihood_map");
  GradientMap out{Grid<double>(flux.height(), flux.width()),
                  Grid<std::uint8_t>(flux.height(), flux.width()), 0};
  for (std::size_t i = 0; i < flux.size(); ++i) {
    if (!(flux[i] >= 0.0)) {
      throw std::domain_error("grad_log_likelihood_map: negative flux");
    }
    const auto g = detail::pixel_gradient(streams.pixels[i], flux[i]);
    if (g) {
      out.gradient[i] = *g;
    } else {
      out.invalid[i] = 1;
      ++out.invalid_count;
    }
  }
  return out;
}

MleMap mle_reconstruct(const EventImage& streams) {
  Grid<double> flux(streams.height(), streams.width());
  Grid<std::uint8_t> status(streams.height(), streams.width());
  for (std::size_t i = 0; i < streams.pixels.size(); ++i) {
    const MleEstimate e = mle_flux(streams.pixels[i]);
    flux[i] = e.flux;
    status[i] = static_cast<std::uint8_t>(e.status);
  }
  return {FluxMap(std::move(flux)), std::move(status)};
}

std::vector<std::uint64_t> simulate_count_histogram(Rate flux, double exposure,
                                                    double dead_time,
                                                    std::size_t pixels,
                                                    std::uint64_t seed) {
  const SensorConfig config = SensorConfig::ideal(exposure, dead_time);
  std::vector<std::uint64_t> hist;
  for (std::size_t i = 0; i < pixels; ++i) {
    RandomSource rng = RandomSource::for_pixel(seed, 0, i);
    const std::size_t count = simulate_pixel(flux, config, rng).count();
    if (count >= hist.size()) hist.resize(count + 1, 0);
    ++hist[count];
  }
  return hist;
}

}  // namespace spad::reference
