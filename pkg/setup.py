from setuptools import setup, find_packages

setup(
    name = 'dicnet',
    version = '0.1.0',
    description = 'Double-incomplete multi-view multi-label classification '
                  'with contrastive representation learning',
    packages = find_packages(exclude = ('tests', 'tests.*')),
    python_requires = '>=3.6',
    install_requires = ['numpy>=1.17', 'scipy>=1.3'],
    extras_require = {'test': ['pytest>=6']},
    entry_points = {'console_scripts': ['dicnet = dicnet.cli:main']}
)
