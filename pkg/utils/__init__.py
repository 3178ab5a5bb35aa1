# Leave this empty – it's just so Python treats these as importable packages
