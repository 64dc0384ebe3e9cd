#include <fstream>
#include <iostream>
#include <iterator>

#include "CLI11.hpp"
#include "kalspan/jobs.hpp"

int main(int argc, char** argv) {
    CLI::App app{"kalspan: certified span and embedding checks for families of vectors"};
    std::string verb;
    std::string file;
    std::string format = "json";
    app.add_option("verb", verb, "approx | relation | certify | integerize | kalton | theorem-scan | verify")
        ->required()
        ->check(CLI::IsMember(kalspan::verbs()));
    app.add_option("file", file, "job document (default: standard input)");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "table"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    std::string text;
    if (file.empty() || file == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            std::cerr << file << ": cannot open\n";
            return 1;
        }
        text.assign(std::istreambuf_iterator<char>(in), {});
    }

    const kalspan::Report r = kalspan::runJobText(verb, text);
    const auto mode = format == "table" ? kalspan::Format::Table : kalspan::Format::Json;
    std::cout << kalspan::formatReport(r.doc, mode);
    if (r.exit != kalspan::ExitCode::Decided) std::cerr << r.doc.value("message", "") << "\n";
    return static_cast<int>(r.exit);
}
