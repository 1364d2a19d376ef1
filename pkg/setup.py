import setuptools

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name="asympode",
    version="0.1.0",
    author="sinusoidal",
    author_email="",
    description="Asymptotic expansions for decaying solutions of dissipative ODE systems with positively homogeneous nonlinearities",
    keywords=['ode','asymptotic','expansion','dissipative','homogeneous','runge-kutta','spectral','normal-form'],
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.9',
    install_requires=['numpy', 'pyparsing>=3', 'pydantic>=2.6'],
    entry_points={
        'console_scripts': ['asympode=asympode.cli.main:main'],
    },
)
