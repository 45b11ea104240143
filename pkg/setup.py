from setuptools import setup, find_packages

setup(
    name='contourforge',
    version='0.1',
    packages=find_packages(exclude=['tests']),
    install_requires=["numpy", "lxml",
                      'tomli; python_version < "3.11"'],
    url='',
    license='',
    description='contours, skeletons and partitions of raster grids',
    entry_points={
        "console_scripts": [
            "contourforge = contourforge.cli:main"
        ]
    }
)
