from .deconvolution import gaussian_kernel, gen_deconvolution
from .image import (GrayImage, binarize, error_rate, labeling_to_image,
                    read_pgm, salt_pepper, write_pgm)
from .synthetic import SyntheticSpec, gen_binary_characterization, gen_synthetic
from .texture import gen_texture, texture_problem
