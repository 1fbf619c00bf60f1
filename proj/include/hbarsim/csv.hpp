#pragma once

#include <iosfwd>
#include <string>

#include "hbarsim/fitsuite.hpp"
#include "hbarsim/spectro.hpp"

namespace hbarsim {

// All CSV output uses 9 significant digits in e-notation and \n line endings,
// so identical data always produces identical bytes.

/// "%.8e" rendering of a double.
std::string format_float(double value);

void write_mode_table_csv(std::ostream& out, const ModeTable& table);
void write_ladder_csv(std::ostream& out, const PhononLadder& ladder);
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);
void write_spectrogram_csv(std::ostream& out, const Spectrogram& spectrogram);

struct EigenComparisonRow {
    int k;
    double f_fd_hz;
    double f_analytic_hz;
    double rel_err;
};
void write_eigen_comparison_csv(std::ostream& out,
                                const std::vector<EigenComparisonRow>& rows);

/// Parse a spectrum CSV (header f_hz,re_s21,im_s21,abs_s21). The magnitude
/// column is redundant and ignored; throws IoError on any malformed content.
Spectrum read_spectrum_csv(std::istream& in);

/// Parse a long-format spectrogram CSV (header flux,f_hz,abs_s21).
Spectrogram read_spectrogram_csv(std::istream& in);

std::string fit_result_to_json(const FitResult& result);

}  // namespace hbarsim
