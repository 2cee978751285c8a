import setuptools


with open("README.md", "r") as readme_file:
    long_description = readme_file.read()

install_requires = []
with open("requirements.txt", "r") as requirements_file:
    for req in (line.strip() for line in requirements_file):
        if req:
            install_requires.append(req)


setuptools.setup(
    name="updyn",
    version="0.1.0",
    author="updyn developers",
    description="Unpredictable points of shift spaces and their transport to concrete maps",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_namespace_packages(include=["updyn", "updyn.*"]),
    entry_points={"console_scripts": ["updyn=updyn.cli:main"]},
    classifiers=[
        "Topic :: Scientific/Engineering :: Mathematics",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Development Status :: 3 - Alpha",
    ],
    python_requires=">=3.8",
    install_requires=install_requires,
)
