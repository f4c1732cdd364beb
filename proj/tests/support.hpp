#pragma once

#include "tsnle/error.hpp"
#include "tsnle/timeseries.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#ifndef TSNLE_FIXTURE_DIR
#error "TSNLE_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace support {

inline std::filesystem::path fixture(const std::string &relative) {
	return std::filesystem::path(TSNLE_FIXTURE_DIR) / relative;
}

inline tsnle::TimeSeries series(std::string id, std::vector<double> values) {
	tsnle::TimeSeries s;
	s.id = std::move(id);
	s.values = std::move(values);
	s.frequency = tsnle::Frequency::yearly;
	return s;
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
	explicit TempDir(const std::string &stem = "tsnle-test") {
		static std::atomic<unsigned> counter{0};
		std::random_device rd;
		path_ = std::filesystem::temp_directory_path() /
		        (stem + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
		std::filesystem::create_directories(path_);
	}
	~TempDir() {
		std::error_code ec;
		std::filesystem::remove_all(path_, ec);
	}
	TempDir(const TempDir &) = delete;
	TempDir &operator=(const TempDir &) = delete;

	const std::filesystem::path &path() const { return path_; }

private:
	std::filesystem::path path_;
};

/// Code of the tsnle::Error thrown by `fn`, or empty when it returns normally.
template <class Fn>
std::optional<tsnle::Errc> code_of(Fn &&fn) {
	try {
		fn();
	} catch (const tsnle::Error &e) {
		return e.code();
	}
	return std::nullopt;
}

inline std::vector<double> uniform_values(std::mt19937_64 &rng, std::size_t n, double lo, double hi) {
	std::uniform_real_distribution<double> dist(lo, hi);
	std::vector<double> v(n);
	for (auto &x : v) {
		x = dist(rng);
	}
	return v;
}

} // namespace support
