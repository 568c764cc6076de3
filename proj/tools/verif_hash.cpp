// verif-hash: prints the 64-bit perceptual hash of image files, one "hex  path" line each.

#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "verif/error.hpp"
#include "verif/image_hash.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Perceptual hash of PNG, JPEG or PNM images"};
  std::vector<std::string> files;
  app.add_option("files", files, "Image files")->required()->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  int status = 0;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      std::cout << verif::hash_to_hex(verif::hash_image(verif::decode_image(bytes))) << "  " << path << "\n";
    } catch (const verif::Error& e) {
      std::cerr << path << ": " << e.what() << "\n";
      status = 1;
    }
  }
  return status;
}
