#include "gpsim/image.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "gpsim/error.hpp"
#include "gpsim/obj.hpp"

namespace gpsim {
namespace {

// libpng and libjpeg report fatal errors through longjmp. The decode
// functions below keep every object with a destructor outside the frames
// that can be jumped over, and convert the failure into an exception only
// after the C library state has been torn down.

struct PngSource {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->size - src->offset < length) png_error(png, "unexpected end of PNG stream");
  std::memcpy(out, src->data + src->offset, length);
  src->offset += length;
}

void png_store_error(png_structp png, png_const_charp message) {
  auto* buffer = static_cast<char*>(png_get_error_ptr(png));
  std::strncpy(buffer, message, 199);
  buffer[199] = '\0';
  png_longjmp(png, 1);
}

void png_ignore_warning(png_structp, png_const_charp) {}

// Returns false on failure with `error` filled; `image` must be empty on entry.
bool decode_png(std::span<const std::uint8_t> bytes, TextureImage& image, char* error) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, error, png_store_error, png_ignore_warning);
  if (!png) {
    std::strcpy(error, "out of memory");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    std::strcpy(error, "out of memory");
    return false;
  }
  PngSource src{bytes.data(), bytes.size(), 0};
  std::vector<png_bytep>* rows = nullptr;

  if (setjmp(png_jmpbuf(png))) {
    delete rows;
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }

  png_set_read_fn(png, &src, png_read_from_memory);
  png_read_info(png, info);

  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int color = png_get_color_type(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  if (png_get_rowbytes(png, info) != static_cast<png_size_t>(width) * 3) {
    png_error(png, "unsupported PNG pixel layout");
  }
  image.width = static_cast<int>(width);
  image.height = static_cast<int>(height);
  image.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  rows = new std::vector<png_bytep>(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    (*rows)[y] = image.pixels.data() + static_cast<std::size_t>(y) * width * 3;
  }
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);

  delete rows;
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_fail(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, mgr->message);
  std::longjmp(mgr->jump, 1);
}

// Truncated or corrupt entropy data only raises warnings in libjpeg; count
// them so the decoder can reject the stream.
void jpeg_count_warning(j_common_ptr cinfo, int level) {
  if (level < 0) ++cinfo->err->num_warnings;
}

bool decode_jpeg(std::span<const std::uint8_t> bytes, TextureImage& image, char* error) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_fail;
  err.base.emit_message = jpeg_count_warning;

  if (setjmp(err.jump)) {
    std::strncpy(error, err.message, 199);
    error[199] = '\0';
    jpeg_destroy_decompress(&cinfo);
    return false;
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  if (cinfo.output_components != 3) {
    std::strcpy(err.message, "unsupported JPEG color layout");
    std::longjmp(err.jump, 1);
  }
  image.width = static_cast<int>(cinfo.output_width);
  image.height = static_cast<int>(cinfo.output_height);
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = image.pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) *
                                             image.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  if (err.base.num_warnings > 0) {
    std::strcpy(err.message, "corrupt or truncated JPEG data");
    std::longjmp(err.jump, 1);
  }
  jpeg_destroy_decompress(&cinfo);
  return true;
}

struct PngSink {
  std::vector<std::uint8_t>* out;
};

void png_write_to_memory(png_structp png, png_bytep data, png_size_t length) {
  auto* sink = static_cast<PngSink*>(png_get_io_ptr(png));
  sink->out->insert(sink->out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

bool encode_png_into(const TextureImage& image, std::vector<std::uint8_t>& out, char* error) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, error, png_store_error, png_ignore_warning);
  if (!png) {
    std::strcpy(error, "out of memory");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    std::strcpy(error, "out of memory");
    return false;
  }
  PngSink sink{&out};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &sink, png_write_to_memory, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() +
                                             static_cast<std::size_t>(y) * image.width * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

TextureImage::TextureImage(int w, int h)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

TextureImage decode_texture(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  char error[200] = "corrupt stream";
  TextureImage image;
  bool ok = false;
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) {
    ok = decode_png(bytes, image, error);
  } else if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    ok = decode_jpeg(bytes, image, error);
  } else {
    throw Error(ErrorKind::Decode, "unsupported image container (expected PNG or JPEG)");
  }
  if (!ok) throw Error(ErrorKind::Decode, std::string("texture decode failed: ") + error);
  if (image.empty()) throw Error(ErrorKind::Decode, "texture has zero size");
  return image;
}

TextureImage load_texture(const std::filesystem::path& path) {
  auto bytes = read_binary_file(path);
  try {
    return decode_texture(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const TextureImage& image) {
  if (image.empty()) throw Error(ErrorKind::Parameter, "cannot encode an empty image");
  std::vector<std::uint8_t> out;
  char error[200] = "encode failed";
  if (!encode_png_into(image, out, error)) {
    throw Error(ErrorKind::Io, std::string("PNG encode failed: ") + error);
  }
  return out;
}

}  // namespace gpsim
