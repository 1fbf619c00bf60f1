#include "hbarsim/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hbarsim/errors.hpp"

namespace hbarsim {

namespace {

// Parse one CSV line into exactly `count` comma-separated fields.
std::vector<std::string> split_fields(const std::string& line, std::size_t count,
                                      std::size_t line_no) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (fields.size() != count) {
        std::ostringstream msg;
        msg << "csv: line " << line_no << ": expected " << count << " fields, got "
            << fields.size();
        throw IoError(msg.str());
    }
    return fields;
}

double parse_double(const std::string& field, std::size_t line_no) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        std::ostringstream msg;
        msg << "csv: line " << line_no << ": bad number '" << field << "'";
        throw IoError(msg.str());
    }
    return value;
}

std::string read_header(std::istream& in, const std::string& expected) {
    std::string line;
    if (!std::getline(in, line))
        throw IoError("csv: empty input, expected header '" + expected + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected)
        throw IoError("csv: wrong header '" + line + "', expected '" + expected + "'");
    return line;
}

}  // namespace

std::string format_float(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8e", value);
    return buf;
}

void write_mode_table_csv(std::ostream& out, const ModeTable& table) {
    out << "n,f_hz,lambda_m\n";
    for (const auto& entry : table.entries)
        out << entry.n << ',' << format_float(entry.f_hz) << ','
            << format_float(entry.lambda_m) << '\n';
}

void write_ladder_csv(std::ostream& out, const PhononLadder& ladder) {
    out << "n,f_hz,g_hz,gamma_hz\n";
    for (const auto& mode : ladder.modes)
        out << mode.n << ',' << format_float(mode.frequency_hz) << ','
            << format_float(mode.coupling_hz) << ','
            << format_float(mode.linewidth_hz) << '\n';
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
    out << "f_hz,re_s21,im_s21,abs_s21\n";
    for (std::size_t i = 0; i < spectrum.frequencies_hz.size(); ++i) {
        // derive the magnitude from the emitted (rounded) re/im so that a
        // parse/emit cycle reproduces the same bytes
        const std::string re = format_float(spectrum.s21[i].real());
        const std::string im = format_float(spectrum.s21[i].imag());
        const std::complex<double> rounded(std::strtod(re.c_str(), nullptr),
                                           std::strtod(im.c_str(), nullptr));
        out << format_float(spectrum.frequencies_hz[i]) << ',' << re << ',' << im
            << ',' << format_float(std::abs(rounded)) << '\n';
    }
}

void write_spectrogram_csv(std::ostream& out, const Spectrogram& spectrogram) {
    out << "flux,f_hz,abs_s21\n";
    for (std::size_t r = 0; r < spectrogram.flux_axis.size(); ++r)
        for (std::size_t c = 0; c < spectrogram.freq_axis_hz.size(); ++c)
            out << format_float(spectrogram.flux_axis[r]) << ','
                << format_float(spectrogram.freq_axis_hz[c]) << ','
                << format_float(spectrogram.magnitude[r][c]) << '\n';
}

void write_eigen_comparison_csv(std::ostream& out,
                                const std::vector<EigenComparisonRow>& rows) {
    out << "k,f_fd_hz,f_analytic_hz,rel_err\n";
    for (const auto& row : rows)
        out << row.k << ',' << format_float(row.f_fd_hz) << ','
            << format_float(row.f_analytic_hz) << ',' << format_float(row.rel_err)
            << '\n';
}

Spectrum read_spectrum_csv(std::istream& in) {
    read_header(in, "f_hz,re_s21,im_s21,abs_s21");
    Spectrum spectrum;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line, 4, line_no);
        const double f = parse_double(fields[0], line_no);
        if (!spectrum.frequencies_hz.empty() && !(f > spectrum.frequencies_hz.back()))
            throw IoError("csv: spectrum frequencies must be strictly increasing");
        spectrum.frequencies_hz.push_back(f);
        spectrum.s21.emplace_back(parse_double(fields[1], line_no),
                                  parse_double(fields[2], line_no));
        parse_double(fields[3], line_no);  // magnitude column is derived
    }
    if (spectrum.frequencies_hz.empty()) throw IoError("csv: spectrum has no rows");
    return spectrum;
}

Spectrogram read_spectrogram_csv(std::istream& in) {
    read_header(in, "flux,f_hz,abs_s21");
    Spectrogram gram;
    std::string line;
    std::size_t line_no = 1;
    bool first_row_done = false;
    std::size_t col = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line, 3, line_no);
        const double flux = parse_double(fields[0], line_no);
        const double f_hz = parse_double(fields[1], line_no);
        const double mag = parse_double(fields[2], line_no);

        if (gram.flux_axis.empty() || flux != gram.flux_axis.back()) {
            if (!gram.flux_axis.empty()) {
                if (!first_row_done) first_row_done = true;
                if (col != gram.freq_axis_hz.size())
                    throw IoError("csv: spectrogram rows have unequal lengths");
            }
            gram.flux_axis.push_back(flux);
            gram.magnitude.emplace_back();
            col = 0;
        }
        if (!first_row_done) {
            if (!gram.freq_axis_hz.empty() && !(f_hz > gram.freq_axis_hz.back()))
                throw IoError("csv: spectrogram frequency axis must be strictly increasing");
            gram.freq_axis_hz.push_back(f_hz);
        } else {
            if (col >= gram.freq_axis_hz.size() || f_hz != gram.freq_axis_hz[col])
                throw IoError("csv: spectrogram frequency axis is inconsistent");
        }
        gram.magnitude.back().push_back(mag);
        ++col;
    }
    if (gram.flux_axis.empty()) throw IoError("csv: spectrogram has no rows");
    if (!gram.magnitude.empty() && gram.magnitude.back().size() != gram.freq_axis_hz.size())
        throw IoError("csv: spectrogram rows have unequal lengths");
    return gram;
}

std::string fit_result_to_json(const FitResult& result) {
    nlohmann::json j;
    j["parameters"] = result.parameters;
    j["uncertainties"] = result.uncertainties;
    j["residual_norm"] = result.residual_norm;
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    return j.dump(2) + "\n";
}

}  // namespace hbarsim
